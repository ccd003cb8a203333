#pragma once

#include "stochy/faust.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace stochy {

struct PrismText {
    std::string sta;
    std::string tra;
    std::string lab;
};

/// PRISM explicit-engine files. `.tra` starts with `S T` for chains (one action)
/// and `S C T` for MDPs, where C counts the choices; probabilities carry 17
/// significant digits. `.sta` lists `(q,c)` per state with the representative
/// point as a trailing comment; the sink is `(Q,0)` with Q the mode count.
PrismText to_prism(const MdpAbstraction& a, const Labeling* labeling);

void write_prism(const std::filesystem::path& stem, const MdpAbstraction& a, const Labeling* labeling);

/// Parses a `.tra` text back into one matrix per action.
std::vector<CsrMatrix> parse_prism_tra(const std::string& text);

} // namespace stochy
