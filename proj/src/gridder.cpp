#include "stochy/gridder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace stochy {

namespace {

// Slivers thinner than this fraction of a cell's width are treated as measure zero,
// so that regions aligned with grid lines up to rounding label as intended.
constexpr double kSliverFraction = 1e-9;

} // namespace

bool HyperRect::contains(const Vec& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

bool HyperRect::contains(const HyperRect& other) const {
    return (other.lower.array() >= lower.array()).all() && (other.upper.array() <= upper.array()).all();
}

double HyperRect::overlap_volume(const HyperRect& other) const {
    double vol = 1.0;
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        const double w = std::min(upper[i], other.upper[i]) - std::max(lower[i], other.lower[i]);
        if (w <= 0.0)
            return 0.0;
        vol *= w;
    }
    return vol;
}

bool HyperRect::well_formed() const {
    return lower.size() == upper.size() && lower.size() > 0 && (lower.array() < upper.array()).all() &&
           lower.allFinite() && upper.allFinite();
}

HyperRect make_rect(std::initializer_list<std::pair<double, double>> bounds) {
    HyperRect r{Vec(static_cast<Eigen::Index>(bounds.size())), Vec(static_cast<Eigen::Index>(bounds.size()))};
    Eigen::Index i = 0;
    for (const auto& [lo, hi] : bounds) {
        r.lower[i] = lo;
        r.upper[i] = hi;
        ++i;
    }
    return r;
}

// ---------------------------------------------------------------------------

Partition uniform_grid(const HyperRect& domain, const Vec& delta) {
    if (!domain.well_formed())
        throw ValidationError("uniform_grid: domain must satisfy lower < upper in every dimension");
    if (delta.size() != domain.lower.size())
        throw ValidationError("uniform_grid: delta has wrong dimension");
    if (!(delta.array() > 0.0).all() || !delta.allFinite())
        throw ValidationError("uniform_grid: cell widths must be positive");

    Partition p;
    p.domain_ = domain;
    const auto n = domain.dim();
    std::size_t total = 1;
    for (std::size_t d = 0; d < n; ++d) {
        const auto di = static_cast<Eigen::Index>(d);
        const double ratio = (domain.upper[di] - domain.lower[di]) / delta[di];
        const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9 * std::max(1.0, ratio))));
        std::vector<double> br(count + 1);
        for (std::size_t i = 0; i < count; ++i)
            br[i] = domain.lower[di] + static_cast<double>(i) * delta[di];
        br[count] = domain.upper[di];
        p.breaks_.push_back(std::move(br));
        p.counts_.push_back(count);
        total *= count;
    }

    p.cells_.reserve(total);
    p.nodes_.reserve(total);
    p.node_of_cell_.reserve(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t c = 0; c < total; ++c) {
        HyperRect r{Vec(static_cast<Eigen::Index>(n)), Vec(static_cast<Eigen::Index>(n))};
        for (std::size_t d = 0; d < n; ++d) {
            r.lower[static_cast<Eigen::Index>(d)] = p.breaks_[d][idx[d]];
            r.upper[static_cast<Eigen::Index>(d)] = p.breaks_[d][idx[d] + 1];
        }
        p.cells_.push_back(r);
        p.nodes_.push_back(Partition::Node{r, c, 0, true});
        p.node_of_cell_.push_back(c);
        // dimension 0 varies fastest
        for (std::size_t d = 0; d < n; ++d) {
            if (++idx[d] < p.counts_[d])
                break;
            idx[d] = 0;
        }
    }
    return p;
}

std::optional<std::size_t> Partition::locate(const Vec& x) const {
    const auto n = dim();
    if (static_cast<std::size_t>(x.size()) != n)
        throw ValidationError("locate: point has wrong dimension");
    std::size_t root = 0;
    std::size_t stride = 1;
    for (std::size_t d = 0; d < n; ++d) {
        const double xd = x[static_cast<Eigen::Index>(d)];
        const auto& br = breaks_[d];
        if (!(xd >= br.front() && xd <= br.back()))
            return std::nullopt;
        auto i = static_cast<std::size_t>(std::upper_bound(br.begin(), br.end(), xd) - br.begin());
        i = std::min(i == 0 ? 0 : i - 1, counts_[d] - 1);
        root += i * stride;
        stride *= counts_[d];
    }
    const Node* node = &nodes_[root];
    while (!node->leaf) {
        const Vec mid = node->rect.center();
        std::size_t child = 0;
        for (std::size_t d = 0; d < n; ++d)
            if (x[static_cast<Eigen::Index>(d)] >= mid[static_cast<Eigen::Index>(d)])
                child |= std::size_t{1} << d;
        node = &nodes_[node->first_child + child];
    }
    return node->cell;
}

Partition split_cell(const Partition& p, std::size_t id) {
    const std::size_t ids[] = {id};
    return split_cells(p, ids);
}

Partition split_cells(const Partition& p, std::span<const std::size_t> ids) {
    std::vector<std::size_t> todo(ids.begin(), ids.end());
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    for (auto id : todo)
        if (id >= p.size())
            throw ValidationError("split_cell: unknown cell " + std::to_string(id));

    Partition out = p;
    const auto n = p.dim();
    const std::size_t fan = std::size_t{1} << n;
    for (auto id : todo) {
        const std::size_t node_id = out.node_of_cell_[id];
        const HyperRect parent = out.nodes_[node_id].rect;
        const Vec mid = parent.center();
        const std::size_t first = out.nodes_.size();
        for (std::size_t c = 0; c < fan; ++c) {
            HyperRect r = parent;
            for (std::size_t d = 0; d < n; ++d) {
                const auto di = static_cast<Eigen::Index>(d);
                if (c & (std::size_t{1} << d))
                    r.lower[di] = mid[di];
                else
                    r.upper[di] = mid[di];
            }
            std::size_t cell_id;
            if (c == 0) {
                cell_id = id;
                out.cells_[id] = r;
                out.node_of_cell_[id] = first;
            } else {
                cell_id = out.cells_.size();
                out.cells_.push_back(r);
                out.node_of_cell_.push_back(first + c);
            }
            out.nodes_.push_back(Partition::Node{r, cell_id, 0, true});
        }
        auto& pn = out.nodes_[node_id];
        pn.leaf = false;
        pn.first_child = first;
    }
    return out;
}

// ---------------------------------------------------------------------------

HybridGrid::HybridGrid(std::vector<Partition> modes) : modes_(std::move(modes)) {
    offsets_.clear();
    offsets_.push_back(0);
    for (const auto& p : modes_)
        offsets_.push_back(offsets_.back() + p.size());
}

HybridGrid::StateRef HybridGrid::decode(std::size_t s) const {
    if (s >= cell_count())
        throw ValidationError("decode: state " + std::to_string(s) + " is the sink or out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), s);
    const auto q = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return {q, s - offsets_[q]};
}

std::size_t HybridGrid::locate(std::size_t q, const Vec& x) const {
    const auto c = modes_.at(q).locate(x);
    return c ? encode(q, *c) : sink();
}

const HyperRect& HybridGrid::rect(std::size_t s) const {
    const auto ref = decode(s);
    return modes_[ref.mode].cell(ref.cell);
}

HybridGrid split_states(const HybridGrid& grid, std::span<const std::size_t> states) {
    std::vector<std::vector<std::size_t>> per_mode(grid.mode_count());
    for (auto s : states) {
        if (s == grid.sink())
            throw ValidationError("split_cell: the sink state cannot be split");
        const auto ref = grid.decode(s);
        per_mode[ref.mode].push_back(ref.cell);
    }
    std::vector<Partition> parts;
    parts.reserve(grid.mode_count());
    for (std::size_t q = 0; q < grid.mode_count(); ++q)
        parts.push_back(per_mode[q].empty() ? grid.mode(q) : split_cells(grid.mode(q), per_mode[q]));
    return HybridGrid(std::move(parts));
}

HybridGrid uniform_hybrid_grid(const HyperRect& domain, const Vec& delta, std::size_t modes) {
    std::vector<Partition> parts(modes, uniform_grid(domain, delta));
    return HybridGrid(std::move(parts));
}

// ---------------------------------------------------------------------------

std::size_t Labeling::count(Label l) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

namespace {

bool positive_overlap(const HyperRect& cell, const HyperRect& region) {
    for (Eigen::Index i = 0; i < cell.lower.size(); ++i) {
        const double w = std::min(cell.upper[i], region.upper[i]) - std::max(cell.lower[i], region.lower[i]);
        if (w <= kSliverFraction * (cell.upper[i] - cell.lower[i]))
            return false;
    }
    return true;
}

} // namespace

bool covered_by_union(const HyperRect& cell, const std::vector<HyperRect>& regions) {
    std::vector<const HyperRect*> relevant;
    for (const auto& r : regions)
        if (positive_overlap(cell, r))
            relevant.push_back(&r);
    if (relevant.empty())
        return false;

    const auto n = cell.dim();
    // Elementary slabs per axis from the region faces inside the cell.
    std::vector<std::vector<double>> cuts(n);
    for (std::size_t d = 0; d < n; ++d) {
        const auto di = static_cast<Eigen::Index>(d);
        auto& c = cuts[d];
        c.push_back(cell.lower[di]);
        c.push_back(cell.upper[di]);
        for (const auto* r : relevant) {
            if (r->lower[di] > cell.lower[di] && r->lower[di] < cell.upper[di])
                c.push_back(r->lower[di]);
            if (r->upper[di] > cell.lower[di] && r->upper[di] < cell.upper[di])
                c.push_back(r->upper[di]);
        }
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }

    std::vector<std::size_t> idx(n, 0);
    Vec centre(static_cast<Eigen::Index>(n));
    while (true) {
        bool sliver = false;
        for (std::size_t d = 0; d < n; ++d) {
            const auto di = static_cast<Eigen::Index>(d);
            const double lo = cuts[d][idx[d]];
            const double hi = cuts[d][idx[d] + 1];
            if (hi - lo <= kSliverFraction * (cell.upper[di] - cell.lower[di]))
                sliver = true;
            centre[di] = 0.5 * (lo + hi);
        }
        if (!sliver) {
            bool inside = false;
            for (const auto* r : relevant)
                if (r->contains(centre)) {
                    inside = true;
                    break;
                }
            if (!inside)
                return false;
        }
        std::size_t d = 0;
        for (; d < n; ++d) {
            if (++idx[d] + 1 < cuts[d].size())
                break;
            idx[d] = 0;
        }
        if (d == n)
            break;
    }
    return true;
}

Labeling label_cells(const Partition& p, const std::vector<HyperRect>& targets,
                     const std::vector<HyperRect>& avoids) {
    Labeling out;
    out.labels.assign(p.size(), Label::safe);
    for (std::size_t c = 0; c < p.size(); ++c) {
        const auto& cell = p.cell(c);
        const bool avoid =
            std::any_of(avoids.begin(), avoids.end(), [&](const HyperRect& r) { return positive_overlap(cell, r); });
        const bool target = !targets.empty() && covered_by_union(cell, targets);
        if (avoid) {
            out.labels[c] = Label::avoid;
            if (target)
                out.conflicts.push_back(c);
        } else if (target) {
            out.labels[c] = Label::target;
        }
    }
    return out;
}

Labeling label_states(const HybridGrid& grid, const std::vector<HyperRect>& targets,
                      const std::vector<HyperRect>& avoids) {
    Labeling out;
    out.labels.reserve(grid.state_count());
    for (std::size_t q = 0; q < grid.mode_count(); ++q) {
        auto part = label_cells(grid.mode(q), targets, avoids);
        for (auto c : part.conflicts)
            out.conflicts.push_back(grid.encode(q, c));
        out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
    }
    out.labels.push_back(Label::avoid);
    return out;
}

std::vector<HyperRect> parse_regions(const std::string& text, std::size_t n) {
    std::vector<HyperRect> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line);
        std::vector<double> vals;
        double v;
        while (ls >> v)
            vals.push_back(v);
        if (!ls.eof())
            throw ValidationError("region line " + std::to_string(lineno) + ": not a number");
        if (vals.size() != 2 * n)
            throw ValidationError("region line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(2 * n) + " values");
        HyperRect r{Vec(static_cast<Eigen::Index>(n)), Vec(static_cast<Eigen::Index>(n))};
        for (std::size_t d = 0; d < n; ++d) {
            r.lower[static_cast<Eigen::Index>(d)] = vals[2 * d];
            r.upper[static_cast<Eigen::Index>(d)] = vals[2 * d + 1];
        }
        if (!r.well_formed())
            throw ValidationError("region line " + std::to_string(lineno) + ": lower must be below upper");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<HyperRect> load_regions(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in)
        throw RuntimeError("cannot open region file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_regions(ss.str(), n);
}

} // namespace stochy
