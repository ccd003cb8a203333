#pragma once

#include "stochy/common.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stochy {

/// Gaussian dynamics of a single mode:
///   x' ~ N(A x + B u + (sum_i u_i N_i) x + F, G G^T)
struct ModeDynamics {
    Mat A;
    Mat B;              // n x v, zero when the model has no inputs
    std::vector<Mat> N; // v matrices of size n x n
    Vec F;
    Mat G;

    Mat covariance() const { return G * G.transpose(); }

    /// Effective state map A + sum_i u_i N_i for a fixed input.
    Mat state_map(const Vec& u) const;
    /// Effective offset B u + F for a fixed input.
    Vec offset(const Vec& u) const;
};

/// Mode switching through a fixed row-stochastic matrix T(q'|q).
struct StochasticModeKernel {
    Mat transition;
};

/// Each action selects the next mode deterministically.
struct ActionModeKernel {
    std::vector<std::size_t> mode_of_action;
};

using ModeKernel = std::variant<StochasticModeKernel, ActionModeKernel>;

struct Action {
    std::string label;
    Vec input; // length v; empty when v == 0
};

struct ShsModel {
    std::vector<ModeDynamics> modes;
    ModeKernel kernel;
    std::size_t n = 0; // state dimension
    std::size_t v = 0; // input dimension
    std::vector<Action> actions;
    std::string description;

    std::size_t mode_count() const { return modes.size(); }
    bool action_driven() const { return std::holds_alternative<ActionModeKernel>(kernel); }

    /// Number of abstract actions: the declared actions, or one implicit action.
    std::size_t action_count() const { return actions.empty() ? 1 : actions.size(); }
    /// Input vector attached to abstract action `a` (zero for the implicit action).
    Vec action_input(std::size_t a) const;

    /// Probability of switching from mode `from` to mode `to` under action `a`.
    double mode_probability(std::size_t from, std::size_t to, std::size_t a) const;
};

struct HybridState {
    std::size_t q = 0;
    Vec x;
};

/// Throws ValidationError if dimensions, kernel rows or the action map are inconsistent.
void validate(const ShsModel& model);

/// Mean of the one-step successor distribution of mode `d` from `x` under input `u`.
/// An empty `u` stands for the zero input.
Vec mode_mean(const ModeDynamics& d, const Vec& x, const Vec& u);

/// Rewrites the model in coordinates y with x = J y.
ShsModel affine_rescale(const ShsModel& model, const Mat& J);

/// Parses the JSON model document (see README for the schema).
ShsModel parse_model(std::string_view text);
ShsModel load_model(const std::string& path);
std::string serialize_model(const ShsModel& model);

} // namespace stochy
