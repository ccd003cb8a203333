#include "stochy/model.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace stochy {

using json = nlohmann::json;

Mat ModeDynamics::state_map(const Vec& u) const {
    Mat M = A;
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (static_cast<std::size_t>(i) < N.size())
            M += u[i] * N[static_cast<std::size_t>(i)];
    return M;
}

Vec ModeDynamics::offset(const Vec& u) const {
    Vec c = F;
    if (u.size() > 0 && B.cols() == u.size())
        c += B * u;
    return c;
}

Vec ShsModel::action_input(std::size_t a) const {
    if (a < actions.size() && actions[a].input.size() == static_cast<Eigen::Index>(v))
        return actions[a].input;
    return Vec::Zero(static_cast<Eigen::Index>(v));
}

double ShsModel::mode_probability(std::size_t from, std::size_t to, std::size_t a) const {
    if (const auto* st = std::get_if<StochasticModeKernel>(&kernel))
        return st->transition(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
    const auto& ak = std::get<ActionModeKernel>(kernel);
    return ak.mode_of_action.at(a) == to ? 1.0 : 0.0;
}

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond)
        throw ValidationError(msg);
}

std::string dims(const Mat& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

void validate(const ShsModel& model) {
    require(!model.modes.empty(), "model needs at least one mode");
    require(model.n >= 1, "state dimension must be at least 1");
    const auto n = static_cast<Eigen::Index>(model.n);
    const auto v = static_cast<Eigen::Index>(model.v);
    for (std::size_t q = 0; q < model.modes.size(); ++q) {
        const auto& d = model.modes[q];
        const std::string where = "mode " + std::to_string(q) + ": ";
        require(d.A.rows() == n && d.A.cols() == n, where + "A is " + dims(d.A) + ", expected square of size n");
        require(d.B.rows() == n && d.B.cols() == v, where + "B is " + dims(d.B) + ", expected n x v");
        require(d.N.size() == model.v, where + "expected one bilinear matrix N per input component");
        for (const auto& Ni : d.N)
            require(Ni.rows() == n && Ni.cols() == n, where + "N matrix is " + dims(Ni) + ", expected n x n");
        require(d.F.size() == n, where + "F has wrong length");
        require(d.G.rows() == n && d.G.cols() == n, where + "G is " + dims(d.G) + ", expected n x n");
        require(d.A.allFinite() && d.B.allFinite() && d.F.allFinite() && d.G.allFinite(),
                where + "non-finite entry");
    }
    const auto m = static_cast<Eigen::Index>(model.modes.size());
    if (const auto* st = std::get_if<StochasticModeKernel>(&model.kernel)) {
        require(st->transition.rows() == m && st->transition.cols() == m,
                "mode transition matrix must be m x m");
        for (Eigen::Index r = 0; r < m; ++r) {
            require((st->transition.row(r).array() >= 0.0).all(), "negative mode transition probability");
            const double s = st->transition.row(r).sum();
            require(std::abs(s - 1.0) <= 1e-12, "mode transition row " + std::to_string(r) + " not stochastic");
        }
    } else {
        const auto& ak = std::get<ActionModeKernel>(model.kernel);
        require(!model.actions.empty(), "action-driven mode kernel needs a non-empty action list");
        require(ak.mode_of_action.size() == model.actions.size(),
                "action-driven mode kernel must map every action");
        for (auto q : ak.mode_of_action)
            require(q < model.modes.size(), "action maps to unknown mode");
    }
    for (const auto& a : model.actions)
        require(a.input.size() == 0 || a.input.size() == v, "action '" + a.label + "' input has wrong length");
}

Vec mode_mean(const ModeDynamics& d, const Vec& x, const Vec& u) {
    if (x.size() != d.A.cols())
        throw ValidationError("mode_mean: state has wrong dimension");
    if (u.size() != 0 && u.size() != d.B.cols())
        throw ValidationError("mode_mean: input has wrong dimension");
    Vec mean = d.A * x + d.F;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        mean += d.B.col(i) * u[i];
        mean += u[i] * (d.N[static_cast<std::size_t>(i)] * x);
    }
    return mean;
}

ShsModel affine_rescale(const ShsModel& model, const Mat& J) {
    const auto n = static_cast<Eigen::Index>(model.n);
    if (J.rows() != n || J.cols() != n)
        throw ValidationError("affine_rescale: J must be n x n");
    Eigen::JacobiSVD<Mat> svd(J);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e14)
        throw ValidationError("affine_rescale: J is singular");
    const Mat Jinv = J.inverse();
    ShsModel out = model;
    for (auto& d : out.modes) {
        d.A = Jinv * d.A * J;
        d.B = Jinv * d.B;
        d.F = Jinv * d.F;
        d.G = Jinv * d.G;
        for (auto& Ni : d.N)
            Ni = Jinv * Ni * J;
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object())
        throw ValidationError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ValidationError(where + ": unknown field '" + key + "'");
}

Mat read_matrix(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ValidationError(what + ": expected a non-empty list of rows");
    if (!j.front().is_array()) {
        // a flat list is read as a column
        Mat m(static_cast<Eigen::Index>(j.size()), 1);
        for (std::size_t i = 0; i < j.size(); ++i)
            m(static_cast<Eigen::Index>(i), 0) = j[i].get<double>();
        return m;
    }
    const auto rows = j.size();
    const auto cols = j.front().size();
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ValidationError(what + ": ragged matrix");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
}

Vec read_vector(const json& j, const std::string& what) {
    Mat m = read_matrix(j, what);
    if (m.cols() == 1)
        return m.col(0);
    if (m.rows() == 1)
        return m.row(0).transpose();
    throw ValidationError(what + ": expected a vector");
}

json write_matrix(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json write_vector(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

} // namespace

ShsModel parse_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    }
    check_keys(doc, {"description", "input_dim", "modes", "mode_kernel", "actions"}, "model");
    if (!doc.contains("modes") || !doc["modes"].is_array() || doc["modes"].empty())
        throw ValidationError("model: 'modes' must be a non-empty list");

    ShsModel model;
    model.description = doc.value("description", std::string{});

    try {
        const auto& modes = doc["modes"];
        const Mat A0 = read_matrix(modes.front().at("A"), "mode 0 A");
        model.n = static_cast<std::size_t>(A0.rows());

        std::size_t v = doc.value("input_dim", std::size_t{0});
        if (!doc.contains("input_dim")) {
            for (const auto& jm : modes) {
                if (jm.contains("B"))
                    v = std::max(v, static_cast<std::size_t>(read_matrix(jm["B"], "B").cols()));
                if (jm.contains("N"))
                    v = std::max(v, jm["N"].size());
            }
        }
        model.v = v;
        const auto n = static_cast<Eigen::Index>(model.n);

        for (std::size_t q = 0; q < modes.size(); ++q) {
            const auto& jm = modes[q];
            const std::string where = "mode " + std::to_string(q);
            check_keys(jm, {"name", "A", "B", "N", "F", "G"}, where);
            ModeDynamics d;
            d.A = read_matrix(jm.at("A"), where + " A");
            d.G = read_matrix(jm.at("G"), where + " G");
            d.F = jm.contains("F") ? read_vector(jm["F"], where + " F") : Vec::Zero(n);
            d.B = jm.contains("B") ? read_matrix(jm["B"], where + " B") : Mat::Zero(n, static_cast<Eigen::Index>(v));
            if (jm.contains("N")) {
                for (const auto& jn : jm["N"])
                    d.N.push_back(read_matrix(jn, where + " N"));
            } else {
                d.N.assign(v, Mat::Zero(n, n));
            }
            model.modes.push_back(std::move(d));
        }

        if (doc.contains("actions")) {
            for (const auto& ja : doc["actions"]) {
                check_keys(ja, {"label", "input"}, "action");
                Action a;
                a.label = ja.value("label", std::string{});
                if (ja.contains("input"))
                    a.input = read_vector(ja["input"], "action input");
                model.actions.push_back(std::move(a));
            }
        }

        if (!doc.contains("mode_kernel"))
            throw ValidationError("model: missing 'mode_kernel'");
        const auto& jk = doc["mode_kernel"];
        check_keys(jk, {"stochastic", "by_action"}, "mode_kernel");
        const bool has_st = jk.contains("stochastic");
        const bool has_act = jk.contains("by_action");
        if (has_st == has_act)
            throw ValidationError("mode_kernel: exactly one of 'stochastic' or 'by_action' is required");
        if (has_st) {
            model.kernel = StochasticModeKernel{read_matrix(jk["stochastic"], "mode_kernel")};
        } else {
            ActionModeKernel ak;
            for (const auto& jq : jk["by_action"])
                ak.mode_of_action.push_back(jq.get<std::size_t>());
            model.kernel = std::move(ak);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    }

    validate(model);
    return model;
}

ShsModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw RuntimeError("cannot open model file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const ShsModel& model) {
    json doc;
    if (!model.description.empty())
        doc["description"] = model.description;
    doc["input_dim"] = model.v;
    json modes = json::array();
    for (const auto& d : model.modes) {
        json jm;
        jm["A"] = write_matrix(d.A);
        if (model.v > 0) {
            jm["B"] = write_matrix(d.B);
            json jn = json::array();
            for (const auto& Ni : d.N)
                jn.push_back(write_matrix(Ni));
            jm["N"] = jn;
        }
        jm["F"] = write_vector(d.F);
        jm["G"] = write_matrix(d.G);
        modes.push_back(std::move(jm));
    }
    doc["modes"] = modes;
    if (const auto* st = std::get_if<StochasticModeKernel>(&model.kernel)) {
        doc["mode_kernel"]["stochastic"] = write_matrix(st->transition);
    } else {
        doc["mode_kernel"]["by_action"] = std::get<ActionModeKernel>(model.kernel).mode_of_action;
    }
    if (!model.actions.empty()) {
        json ja = json::array();
        for (const auto& a : model.actions) {
            json j;
            j["label"] = a.label;
            if (a.input.size() > 0)
                j["input"] = write_vector(a.input);
            ja.push_back(std::move(j));
        }
        doc["actions"] = ja;
    }
    return doc.dump(2);
}

} // namespace stochy
