// Copyright 2026 The weakval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "weakval/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "weakval/errors.hpp"

namespace weakval {

using nlohmann::json;

Operator ObservableSpec::resolve(const Dims& dims) const {
    if (full) {
        if (full->dims() != dims) {
            throw ConfigError("observable '" + label + "' has mismatched dims");
        }
        return *full;
    }
    if (terms.empty()) {
        throw ConfigError("observable '" + label + "' has no terms");
    }
    Operator acc = embed(terms.front().op, terms.front().site, dims);
    for (std::size_t i = 1; i < terms.size(); ++i) {
        const Operator t = embed(terms[i].op, terms[i].site, dims);
        acc = combine == Combine::Sum ? acc + t : acc * t;
    }
    return acc;
}

TwoStateVector ScenarioSpec::two_state_vector() const { return TwoStateVector(pre_ket(), post_ket()); }

PointerConfig ScenarioSpec::pointer_config(std::optional<double> delta_override,
                                           std::optional<Topology> topology_override) const {
    PointerConfig c;
    c.topology = topology_override.value_or(topology);
    c.delta = delta_override.value_or(delta);
    c.coupling = coupling;
    c.validate();
    return c;
}

void ScenarioSpec::validate() const {
    if (name.empty()) {
        throw ConfigError("scenario needs a name");
    }
    (void)two_state_vector();
    for (const auto& o : observables) {
        (void)o.resolve(dims);
    }
    for (const auto& c : couplings) {
        (void)full_operator(c, dims);
    }
    (void)pointer_config();
}

namespace {

bool same_operator(const Operator& a, const Operator& b) {
    return a.dims() == b.dims() && a.is_hermitian() == b.is_hermitian() && a.entries() == b.entries();
}

bool same_local(const LocalObservable& a, const LocalObservable& b) {
    return a.site == b.site && same_operator(a.op, b.op);
}

bool same_observable(const ObservableSpec& a, const ObservableSpec& b) {
    if (a.label != b.label || a.combine != b.combine || a.terms.size() != b.terms.size() ||
        a.full.has_value() != b.full.has_value()) {
        return false;
    }
    if (a.full && !same_operator(*a.full, *b.full)) {
        return false;
    }
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (!same_local(a.terms[i], b.terms[i])) {
            return false;
        }
    }
    return true;
}

bool same_coupling(const Coupling& a, const Coupling& b) {
    return a.site == b.site && a.label == b.label && same_operator(a.op, b.op);
}

template <typename T, typename Eq>
bool same_list(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!eq(a[i], b[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace

bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
    return a.name == b.name && a.description == b.description && a.protocol == b.protocol && a.dims == b.dims &&
           a.pre == b.pre && a.post == b.post && a.topology == b.topology && a.epsilon == b.epsilon &&
           a.delta == b.delta && a.coupling == b.coupling &&
           same_list(a.observables, b.observables, same_observable) &&
           same_list(a.couplings, b.couplings, same_coupling);
}

// ---------------------------------------------------------------------------
// Built-in catalogue. Basis order is lexicographic over sigma_z eigenstates
// with spin up first: for two qubits (uu, ud, du, dd); for spin-1 (+1, 0, -1).

namespace {

constexpr Complex kI{0.0, 1.0};

LocalObservable local(const Operator& op, std::size_t site) { return {op, site}; }

ObservableSpec single(std::string label, const Operator& op, std::size_t site) {
    return {std::move(label), {local(op, site)}, Combine::Sum, std::nullopt};
}

ObservableSpec pair(std::string label, const Operator& op, Combine combine) {
    return {std::move(label), {local(op, 0), local(op, 1)}, combine, std::nullopt};
}

std::vector<ObservableSpec> qubit_pair_observables() {
    const Operator z = ops::sigma_z();
    return {pair("sz_A+sz_B", z, Combine::Sum), single("sz_A", z, 0), single("sz_B", z, 1),
            pair("sz_A*sz_B", z, Combine::Product)};
}

std::vector<Coupling> local_couplings(const Operator& op) {
    return {{op, 0, "sz_A"}, {op, 1, "sz_B"}};
}

ScenarioSpec qubit_pair(std::string name, std::string description, std::vector<Complex> pre,
                        std::vector<Complex> post, Topology topology, double delta) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.dims = {2, 2};
    s.pre = std::move(pre);
    s.post = std::move(post);
    s.observables = qubit_pair_observables();
    s.couplings = local_couplings(ops::sigma_z());
    s.topology = topology;
    s.delta = delta;
    return s;
}

ScenarioSpec make_builtin(std::string_view name, std::optional<double> epsilon) {
    const double r = 1.0 / std::sqrt(2.0);
    if (name == "singlet_sum") {
        return qubit_pair("singlet_sum", "Singlet with sum-of-spins device; non-demolition demonstration",
                          {0.0, r, -r, 0.0}, {0.0, r, -r, 0.0}, Topology::EntangledSum, 0.1);
    }
    if (name == "epsilon_sum") {
        const double e = epsilon.value_or(0.1);
        ScenarioSpec s = qubit_pair("epsilon_sum",
                                    "Pre (ud + du + e uu), post (ud - du + e uu); local sum of two spins",
                                    {e, 1.0, 1.0, 0.0}, {e, 1.0, -1.0, 0.0}, Topology::LocalProduct, 600.0);
        s.epsilon = e;
        return s;
    }
    if (name == "two_state_22") {
        return qubit_pair("two_state_22",
                          "Post (uu + ud + du + dd), pre (0.95 ud - 1.05 du + 0.11 uu); sum weak value 22",
                          {0.11, 0.95, -1.05, 0.0}, {1.0, 1.0, 1.0, 1.0}, Topology::EntangledSum, 100.0);
    }
    if (name == "product_phase") {
        return qubit_pair("product_phase", "Pre |+x,+x>, post (uu + dd + i(ud - du))/2; product weak value +1",
                          {0.5, 0.5, 0.5, 0.5}, {0.5, 0.5 * kI, -0.5 * kI, 0.5}, Topology::LocalProduct, 100.0);
    }
    if (name == "product_phase_prime") {
        return qubit_pair("product_phase_prime",
                          "Pre |+x,+x>, post (uu - dd + i(ud + du))/2; product weak value -1",
                          {0.5, 0.5, 0.5, 0.5}, {0.5, 0.5 * kI, 0.5 * kI, -0.5}, Topology::LocalProduct, 100.0);
    }
    if (name == "spin1_causality") {
        ScenarioSpec s;
        s.name = "spin1_causality";
        s.description = "Two spin-1 particles, (|-1> + |0>)_A |0>_B; product sz_A sz_B is not measurable";
        s.protocol = "spin1_causality";
        s.dims = {3, 3};
        s.pre.assign(9, 0.0);
        s.pre[1 * 3 + 1] = r;  // |0>_A |0>_B
        s.pre[2 * 3 + 1] = r;  // |-1>_A |0>_B
        s.post = s.pre;
        const Operator z = ops::spin1_z();
        s.observables = {pair("sz_A*sz_B", z, Combine::Product), single("sz_A", z, 0), single("sz_B", z, 1)};
        s.couplings = local_couplings(z);
        s.topology = Topology::LocalProduct;
        s.delta = 0.05;
        return s;
    }
    if (name == "modsum_identity") {
        ScenarioSpec s = qubit_pair("modsum_identity", "sz_A sz_B = ((sz_A + sz_B) mod 4) - 1 on two qubits",
                                    {0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5}, Topology::EntangledSum, 0.1);
        s.protocol = "modsum_identity";
        return s;
    }
    throw ConfigError("unknown builtin scenario '" + std::string(name) + "'");
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"singlet_sum",   "epsilon_sum",         "two_state_22",   "product_phase",
            "product_phase_prime", "spin1_causality", "modsum_identity"};
}

ScenarioSpec builtin(std::string_view name, std::optional<double> epsilon) {
    ScenarioSpec s = make_builtin(name, epsilon);
    s.validate();
    return s;
}

double spin1_causality(BobAction action, bool nonlocal_measurement) {
    const Dims dims{3, 3};
    const double r = 1.0 / std::sqrt(2.0);
    // Alice: (|-1> + |0>)/sqrt(2); Bob: |0>, or |1> after his flip.
    Eigen::VectorXcd alice = Eigen::VectorXcd::Zero(3);
    alice[1] = r;
    alice[2] = r;
    Eigen::VectorXcd bob = Eigen::VectorXcd::Zero(3);
    bob[action == BobAction::Nothing ? 1 : 0] = 1.0;
    const Ket psi(kron(alice, bob), dims);

    const Operator alice_projector(kron(alice * alice.adjoint(), Eigen::MatrixXcd::Identity(3, 3)), dims, true);
    auto success = [&](const Eigen::VectorXcd& v) { return alice_projector.apply(v).squaredNorm(); };

    if (!nonlocal_measurement) {
        return success(psi.amplitudes()) / psi.squared_norm();
    }
    const Operator z = ops::spin1_z();
    const SpectralDecomposition product = eigendecompose(embed(z, 0, dims) * embed(z, 1, dims));
    double p = 0.0;
    for (const auto& c : product.components()) {
        p += success(c.projector.apply(psi.amplitudes()));
    }
    return p / psi.squared_norm();
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError("complex numbers are written as [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(const std::vector<Complex>& v) {
    json out = json::array();
    for (Complex z : v) {
        out.push_back(complex_to_json(z));
    }
    return out;
}

std::vector<Complex> vector_from_json(const json& j) {
    if (!j.is_array()) {
        throw ConfigError("ket coefficients must be a list");
    }
    std::vector<Complex> out;
    for (const auto& e : j) {
        out.push_back(complex_from_json(e));
    }
    return out;
}

json matrix_to_json(const Operator& op) {
    json rows = json::array();
    const auto& m = op.entries();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(complex_to_json(m(i, k)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Operator named_operator(const std::string& name) {
    if (name == "sigma_x") {
        return ops::sigma_x();
    }
    if (name == "sigma_y") {
        return ops::sigma_y();
    }
    if (name == "sigma_z") {
        return ops::sigma_z();
    }
    if (name == "spin1_z") {
        return ops::spin1_z();
    }
    throw ConfigError("unknown named operator '" + name + "'");
}

// Reads {"matrix": ...} or {"named": ...}; `dims` is the expected subsystem
// layout of the operator.
Operator operator_from_json(const json& j, const Dims& dims) {
    if (j.contains("named")) {
        Operator op = named_operator(j.at("named").get<std::string>());
        if (op.dims() != dims) {
            throw ConfigError("named operator does not fit its site");
        }
        return op;
    }
    const json& rows = j.at("matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != n) {
            throw ConfigError("operator matrix must be square");
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
        }
    }
    return Operator::detect(std::move(m), dims);
}

Dims site_dims(const Dims& dims, std::size_t site) {
    if (site >= dims.size()) {
        throw ConfigError("site index out of range");
    }
    return {dims[site]};
}

json local_to_json(const LocalObservable& l) { return {{"site", l.site}, {"matrix", matrix_to_json(l.op)}}; }

LocalObservable local_from_json(const json& j, const Dims& dims) {
    const auto site = j.at("site").get<std::size_t>();
    return {operator_from_json(j, site_dims(dims, site)), site};
}

json observable_to_json(const ObservableSpec& o) {
    json j{{"label", o.label}};
    if (o.full) {
        j["matrix"] = matrix_to_json(*o.full);
        return j;
    }
    j["combine"] = o.combine == Combine::Sum ? "sum" : "product";
    json terms = json::array();
    for (const auto& t : o.terms) {
        terms.push_back(local_to_json(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

ObservableSpec observable_from_json(const json& j, const Dims& dims) {
    ObservableSpec o;
    o.label = j.value("label", "");
    if (j.contains("matrix") || j.contains("named")) {
        o.full = operator_from_json(j, dims);
        return o;
    }
    const std::string combine = j.value("combine", "sum");
    if (combine == "sum") {
        o.combine = Combine::Sum;
    } else if (combine == "product") {
        o.combine = Combine::Product;
    } else {
        throw ConfigError("observable combine must be 'sum' or 'product'");
    }
    for (const auto& t : j.at("terms")) {
        o.terms.push_back(local_from_json(t, dims));
    }
    return o;
}

json coupling_to_json(const Coupling& c) {
    json j{{"label", c.label}, {"matrix", matrix_to_json(c.op)}};
    if (c.site) {
        j["site"] = *c.site;
    }
    return j;
}

Coupling coupling_from_json(const json& j, const Dims& dims) {
    Coupling c{Operator::identity({1}), std::nullopt, j.value("label", "")};
    if (j.contains("site")) {
        c.site = j.at("site").get<std::size_t>();
        c.op = operator_from_json(j, site_dims(dims, *c.site));
    } else {
        c.op = operator_from_json(j, dims);
    }
    return c;
}

}  // namespace

std::string scenario_to_json(const ScenarioSpec& spec, int indent) {
    json j;
    j["name"] = spec.name;
    j["description"] = spec.description;
    j["protocol"] = spec.protocol;
    j["dims"] = spec.dims;
    j["pre"] = vector_to_json(spec.pre);
    j["post"] = vector_to_json(spec.post);
    json obs = json::array();
    for (const auto& o : spec.observables) {
        obs.push_back(observable_to_json(o));
    }
    j["observables"] = std::move(obs);
    json cps = json::array();
    for (const auto& c : spec.couplings) {
        cps.push_back(coupling_to_json(c));
    }
    j["couplings"] = std::move(cps);
    j["topology"] = to_string(spec.topology);
    json params{{"delta", spec.delta}, {"coupling", spec.coupling}};
    if (spec.epsilon) {
        params["epsilon"] = *spec.epsilon;
    }
    j["parameters"] = std::move(params);
    return j.dump(indent);
}

ScenarioSpec scenario_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario JSON does not parse: ") + e.what());
    }
    try {
        ScenarioSpec s;
        s.name = j.at("name").get<std::string>();
        s.description = j.value("description", "");
        s.protocol = j.value("protocol", "tsv");
        s.dims = j.at("dims").get<Dims>();
        s.pre = vector_from_json(j.at("pre"));
        s.post = vector_from_json(j.at("post"));
        for (const auto& o : j.value("observables", json::array())) {
            s.observables.push_back(observable_from_json(o, s.dims));
        }
        for (const auto& c : j.value("couplings", json::array())) {
            s.couplings.push_back(coupling_from_json(c, s.dims));
        }
        s.topology = parse_topology(j.value("topology", "local-product"));
        const json params = j.value("parameters", json::object());
        s.delta = params.value("delta", 1.0);
        s.coupling = params.value("coupling", 1.0);
        if (params.contains("epsilon")) {
            s.epsilon = params.at("epsilon").get<double>();
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
}

ScenarioSpec load_scenario(const std::string& name_or_path) {
    for (const auto& n : builtin_names()) {
        if (n == name_or_path) {
            return builtin(n);
        }
    }
    std::ifstream in(name_or_path);
    if (!in) {
        throw ConfigError("'" + name_or_path + "' is neither a builtin scenario nor a readable file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

}  // namespace weakval
