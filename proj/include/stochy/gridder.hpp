#pragma once

#include "stochy/common.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stochy {

struct HyperRect {
    Vec lower;
    Vec upper;

    std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
    Vec center() const { return 0.5 * (lower + upper); }
    Vec widths() const { return upper - lower; }
    double volume() const { return widths().prod(); }
    double diameter() const { return widths().norm(); }
    /// Closed containment.
    bool contains(const Vec& x) const;
    bool contains(const HyperRect& other) const;
    /// Volume of the intersection (0 for face contact).
    double overlap_volume(const HyperRect& other) const;
    bool well_formed() const;
};

HyperRect make_rect(std::initializer_list<std::pair<double, double>> bounds);

/// Axis-aligned partition of a bounded domain for one mode.
///
/// Cells are leaves of a refinement forest rooted at a uniform grid. Splitting a
/// cell keeps every other cell id: the lowest child reuses the parent's id and
/// the remaining 2^n - 1 children are appended.
class Partition {
public:
    Partition() = default;

    const HyperRect& domain() const { return domain_; }
    const std::vector<HyperRect>& cells() const { return cells_; }
    const HyperRect& cell(std::size_t id) const { return cells_.at(id); }
    std::size_t size() const { return cells_.size(); }
    std::size_t dim() const { return domain_.dim(); }

    /// Cell containing x. Shared faces belong to the cell on the upper side;
    /// the domain's own upper faces belong to the last cell. nullopt outside the domain.
    std::optional<std::size_t> locate(const Vec& x) const;

    /// Grid cell counts per axis of the root grid.
    const std::vector<std::size_t>& grid_counts() const { return counts_; }

    friend Partition uniform_grid(const HyperRect& domain, const Vec& delta);
    friend Partition split_cells(const Partition& p, std::span<const std::size_t> ids);

private:
    struct Node {
        HyperRect rect;
        std::size_t cell = 0;        // valid when leaf
        std::size_t first_child = 0; // valid when !leaf
        bool leaf = true;
    };

    HyperRect domain_;
    std::vector<std::vector<double>> breaks_;
    std::vector<std::size_t> counts_;
    std::vector<HyperRect> cells_;
    std::vector<Node> nodes_; // the first prod(counts_) nodes are the grid roots
    std::vector<std::size_t> node_of_cell_;
};

/// ceil(width/delta) cells per axis; the last cell on each axis is truncated to the domain.
Partition uniform_grid(const HyperRect& domain, const Vec& delta);
/// Bisects `id` along every axis (2^n children).
Partition split_cell(const Partition& p, std::size_t id);
Partition split_cells(const Partition& p, std::span<const std::size_t> ids);

/// Flat state indexing over per-mode partitions: mode 0 cells, mode 1 cells, ..., sink.
class HybridGrid {
public:
    HybridGrid() = default;
    explicit HybridGrid(std::vector<Partition> modes);

    struct StateRef {
        std::size_t mode;
        std::size_t cell;
    };

    const std::vector<Partition>& modes() const { return modes_; }
    const Partition& mode(std::size_t q) const { return modes_.at(q); }
    std::size_t mode_count() const { return modes_.size(); }
    std::size_t cell_count() const { return offsets_.back(); }
    std::size_t state_count() const { return cell_count() + 1; }
    std::size_t sink() const { return cell_count(); }
    std::size_t offset(std::size_t q) const { return offsets_.at(q); }

    std::size_t encode(std::size_t q, std::size_t cell) const { return offsets_[q] + cell; }
    StateRef decode(std::size_t s) const;
    /// Flat state of (q, x), or the sink.
    std::size_t locate(std::size_t q, const Vec& x) const;
    const HyperRect& rect(std::size_t s) const;

private:
    std::vector<Partition> modes_;
    std::vector<std::size_t> offsets_{0};
};

/// Splits the given flat states (grid cells); throws on the sink. Flat ids of the
/// result differ from the input when more than one mode is present.
HybridGrid split_states(const HybridGrid& grid, std::span<const std::size_t> states);

HybridGrid uniform_hybrid_grid(const HyperRect& domain, const Vec& delta, std::size_t modes);

enum class Label : std::uint8_t { safe, target, avoid };

struct Labeling {
    std::vector<Label> labels;           // one per flat state, sink included
    std::vector<std::size_t> conflicts;  // states that met both target and avoid regions

    bool is(std::size_t s, Label l) const { return labels[s] == l; }
    std::size_t count(Label l) const;
};

/// Per-cell labels: target when the cell lies inside the union of target regions,
/// avoid when it overlaps an avoid region with positive volume, safe otherwise.
/// Cells meeting both rules become avoid and are reported in `conflicts`.
Labeling label_cells(const Partition& p, const std::vector<HyperRect>& targets,
                     const std::vector<HyperRect>& avoids);

/// Labels every state of a hybrid grid (regions apply in all modes); the sink
/// gets Label::avoid.
Labeling label_states(const HybridGrid& grid, const std::vector<HyperRect>& targets,
                      const std::vector<HyperRect>& avoids);

/// True when `cell` is covered by the union of `regions` up to measure zero.
bool covered_by_union(const HyperRect& cell, const std::vector<HyperRect>& regions);

/// Region file: one rectangle per line as `l1 u1 l2 u2 ... ln un`.
std::vector<HyperRect> parse_regions(const std::string& text, std::size_t n);
std::vector<HyperRect> load_regions(const std::string& path, std::size_t n);

} // namespace stochy
