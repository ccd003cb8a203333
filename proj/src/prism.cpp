#include "stochy/prism.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stochy {

namespace {

std::string prob17(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!(f << text))
        throw RuntimeError("cannot write '" + p.string() + "'");
}

} // namespace

PrismText to_prism(const MdpAbstraction& a, const Labeling* labeling) {
    const auto& grid = a.grid;
    const std::size_t S = grid.state_count();
    PrismText out;

    std::ostringstream sta;
    sta << "(q,c)\n";
    for (std::size_t s = 0; s < S; ++s) {
        if (s == grid.sink()) {
            sta << s << ":(" << grid.mode_count() << ",0) // sink\n";
            continue;
        }
        const auto ref = grid.decode(s);
        sta << s << ":(" << ref.mode << ',' << ref.cell << ") // x=(";
        const auto& x = a.rep_points[s];
        for (Eigen::Index i = 0; i < x.size(); ++i)
            sta << (i ? "," : "") << prob17(x[i]);
        sta << ")\n";
    }
    out.sta = sta.str();

    std::size_t nnz = 0;
    for (const auto& T : a.transitions)
        nnz += T.nnz();
    const bool mdp = a.action_count() > 1;
    std::ostringstream tra;
    if (mdp)
        tra << S << ' ' << S * a.action_count() << ' ' << nnz << '\n';
    else
        tra << S << ' ' << nnz << '\n';
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t act = 0; act < a.action_count(); ++act) {
            const auto& T = a.transitions[act];
            for (std::size_t k = T.row_ptr[s]; k < T.row_ptr[s + 1]; ++k) {
                tra << s << ' ';
                if (mdp)
                    tra << act << ' ';
                tra << T.col[k] << ' ' << prob17(T.val[k]) << '\n';
            }
        }
    out.tra = tra.str();

    std::ostringstream lab;
    lab << "0=\"init\" 1=\"deadlock\" 2=\"target\" 3=\"avoid\" 4=\"sink\"\n";
    if (labeling)
        for (std::size_t s = 0; s < S; ++s) {
            std::string ids;
            if (labeling->is(s, Label::target))
                ids += " 2";
            if (labeling->is(s, Label::avoid))
                ids += " 3";
            if (s == grid.sink())
                ids += " 4";
            if (!ids.empty())
                lab << s << ':' << ids << '\n';
        }
    else
        lab << grid.sink() << ": 4\n";
    out.lab = lab.str();
    return out;
}

void write_prism(const std::filesystem::path& stem, const MdpAbstraction& a, const Labeling* labeling) {
    if (stem.has_parent_path())
        std::filesystem::create_directories(stem.parent_path());
    const auto text = to_prism(a, labeling);
    auto with = [&](const char* ext) {
        auto p = stem;
        p += ext;
        return p;
    };
    write_text(with(".sta"), text.sta);
    write_text(with(".tra"), text.tra);
    write_text(with(".lab"), text.lab);
}

std::vector<CsrMatrix> parse_prism_tra(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header))
        throw ValidationError("empty .tra text");
    std::istringstream hs(header);
    std::vector<std::size_t> counts;
    for (std::size_t v; hs >> v;)
        counts.push_back(v);
    if (counts.size() != 2 && counts.size() != 3)
        throw ValidationError(".tra header must be `S T` or `S C T`");
    const bool mdp = counts.size() == 3;
    const std::size_t S = counts[0];
    const std::size_t actions = mdp ? counts[1] / std::max<std::size_t>(S, 1) : 1;
    std::vector<std::vector<Triplet>> trip(actions);
    std::string line;
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::size_t src = 0, act = 0, dst = 0;
        double p = 0.0;
        if (!(ls >> src))
            throw ValidationError("bad .tra line: " + line);
        if (mdp && !(ls >> act))
            throw ValidationError("bad .tra line: " + line);
        if (!(ls >> dst >> p) || act >= actions)
            throw ValidationError("bad .tra line: " + line);
        trip[act].push_back({static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst), p});
        ++seen;
    }
    if (seen != counts.back())
        throw ValidationError(".tra transition count does not match the header");
    std::vector<CsrMatrix> out;
    for (auto& t : trip)
        out.push_back(CsrMatrix::from_triplets(S, S, std::move(t)));
    return out;
}

} // namespace stochy
