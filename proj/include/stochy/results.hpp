#pragma once

#include "stochy/checker.hpp"
#include "stochy/faust.hpp"
#include "stochy/imdp.hpp"
#include "stochy/simulator.hpp"

#include <filesystem>
#include <string>

namespace stochy {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

namespace results {

using Path = std::filesystem::path;

/// One cell centre per line.
void write_representative_points(const Path& p, const MdpAbstraction& a);
/// `src dst p` per nonzero, prefixed by the action index when there are several actions.
void write_transition_matrix(const Path& p, const MdpAbstraction& a);
/// The raw (unsaturated) global error.
void write_error(const Path& p, double global_error);
/// `src dst bound` per stored entry of the lower or upper matrices, action-prefixed for several actions.
void write_interval_bounds(const Path& p, const ImdpAbstraction& a, bool upper);
/// `state p_low p_high eps`.
void write_solution(const Path& p, const CheckResult& r);
/// FAUST point values: `state p p E`.
void write_point_solution(const Path& p, const std::vector<double>& values, double global_error);
/// `state action`, or `step state action` for time-indexed strategies.
void write_policy(const Path& p, const Strategy& s);
/// `state mode l1 u1 ... ln un label`; the sink is omitted.
void write_cells(const Path& p, const HybridGrid& grid, const Labeling* labeling);
/// `key value` lines.
void write_summary(const Path& p, const std::vector<std::pair<std::string, std::string>>& fields);
/// CSV `trace,step,mode,x1,...,xn`.
void write_traces(const Path& p, const TraceSet& ts);
/// CSV `variable,bin,lower,upper,count` for the mode and every coordinate at one step.
void write_histograms(const Path& p, const TraceSet& ts, std::size_t step, std::size_t bins);

} // namespace results

} // namespace stochy
