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

#include "weakval/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "weakval/errors.hpp"
#include "weakval/report.hpp"
#include "weakval/sampling.hpp"
#include "weakval/scenarios.hpp"
#include "weakval/tsvf.hpp"

namespace weakval {

void RunConfig::validate() const {
    const bool needs_scenario = command == "weakvalue" || command == "abl" || command == "moments" ||
                                command == "sweep" || command == "sample" ||
                                (command == "scenario" && subcommand == "export");
    if (needs_scenario && scenario.empty()) {
        throw ConfigError("--scenario is required for " + command);
    }
    if (delta && !(*delta > 0.0)) {
        throw ConfigError("--delta must be positive");
    }
    if (command == "sweep") {
        sweep.validate();
    }
    if (command == "sample" && shots == 0) {
        throw ConfigError("--shots must be at least 1");
    }
}

namespace {

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

ScenarioSpec resolve_scenario(const RunConfig& c) {
    if (c.epsilon) {
        return builtin(c.scenario, c.epsilon);
    }
    return load_scenario(c.scenario);
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
    if (c.out.empty() || c.out == "-") {
        out << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot write output file '" + c.out + "'");
    }
    f << text;
    if (!f) {
        throw ConfigError("failed writing output file '" + c.out + "'");
    }
}

std::string cmd_weakvalue(const RunConfig& c) {
    const ScenarioSpec s = resolve_scenario(c);
    const TwoStateVector tsv = s.two_state_vector();
    std::vector<std::pair<std::string, Complex>> rows;
    for (const auto& o : s.observables) {
        rows.emplace_back(o.label, weak_value(tsv, o.resolve(s.dims)));
    }
    std::ostringstream os;
    if (c.format == "json") {
        nlohmann::ordered_json j;
        j["scenario"] = s.name;
        auto arr = nlohmann::ordered_json::array();
        for (const auto& [label, w] : rows) {
            arr.push_back({{"observable", label}, {"re", w.real()}, {"im", w.imag()}});
        }
        j["weak_values"] = std::move(arr);
        os << j.dump(2) << '\n';
    } else if (c.format == "csv") {
        os << "observable,re,im\n";
        for (const auto& [label, w] : rows) {
            os << label << ',' << fmt_num(w.real()) << ',' << fmt_num(w.imag()) << '\n';
        }
    } else {
        os << fmt::format("{:<14} {:>22} {:>22}\n", "observable", "re", "im");
        for (const auto& [label, w] : rows) {
            os << fmt::format("{:<14} {:>22.15g} {:>22.15g}\n", label, w.real(), w.imag());
        }
    }
    return os.str();
}

std::string cmd_abl(const RunConfig& c) {
    const ScenarioSpec s = resolve_scenario(c);
    const TwoStateVector tsv = s.two_state_vector();
    std::ostringstream os;
    os << "observable,measurement,outcome,probability\n";
    for (const auto& o : s.observables) {
        const SpectralDecomposition d = eigendecompose(o.resolve(s.dims));
        double mean = 0.0;
        for (const auto& [value, p] : abl_probabilities(tsv, d)) {
            os << fmt::format("{},ideal,{},{}\n", o.label, fmt_num(value), fmt_num(p));
            mean += value * p;
        }
        os << fmt::format("{},ideal,mean,{}\n", o.label, fmt_num(mean));
        if (!o.full && o.terms.size() > 1) {
            double jmean = 0.0;
            for (const auto& jo : joint_abl_probabilities(tsv, o.terms)) {
                const double v = combine_outcomes(o.combine, jo.eigenvalues);
                std::string tag;
                for (double e : jo.eigenvalues) {
                    tag += (tag.empty() ? "" : ";") + fmt_num(e);
                }
                os << fmt::format("{},separate,{},{}\n", o.label, tag, fmt_num(jo.probability));
                jmean += v * jo.probability;
            }
            os << fmt::format("{},separate,mean,{}\n", o.label, fmt_num(jmean));
        }
    }
    return os.str();
}

nlohmann::ordered_json moments_json(const MomentSet& m) {
    auto vec = [](const Eigen::VectorXd& v) {
        std::vector<double> out(v.data(), v.data() + v.size());
        return out;
    };
    auto mat = [](const Eigen::MatrixXd& a) {
        std::vector<std::vector<double>> out;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            std::vector<double> row;
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                row.push_back(a(i, j));
            }
            out.push_back(row);
        }
        return out;
    };
    nlohmann::ordered_json j;
    j["p_postselect"] = m.p_postselect;
    j["meanQ"] = vec(m.meanQ);
    j["corrQQ"] = mat(m.corrQQ);
    j["meanP"] = vec(m.meanP);
    j["corrPP"] = mat(m.corrPP);
    return j;
}

std::string cmd_moments(const RunConfig& c) {
    const ScenarioSpec s = resolve_scenario(c);
    const double delta = c.delta.value_or(s.delta);
    const BranchedPointerState state = prepare_device(s, delta, c.topology);
    nlohmann::ordered_json j;
    j["scenario"] = s.name;
    j["delta"] = delta;
    j["topology"] = to_string(state.config().topology);
    j["closed_form"] = moments_json(moments_closed_form(state));
    if (c.oracle) {
        j["grid_oracle"] = moments_json(moments_grid_oracle(state));
    }
    return j.dump(2) + "\n";
}

std::string cmd_sweep(const RunConfig& c) {
    const ScenarioSpec s = resolve_scenario(c);
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(s, c.estimator, c.sweep, c.shots, c.seed));
    return os.str();
}

std::string cmd_sample(const RunConfig& c) {
    const ScenarioSpec s = resolve_scenario(c);
    const double delta = c.delta.value_or(s.delta);
    std::ostringstream os;
    if (c.estimator_set) {
        const EnsembleStats st = run_experiment(s, c.estimator, delta, c.shots, c.seed, c.topology);
        nlohmann::ordered_json j;
        j["scenario"] = s.name;
        j["estimator"] = st.estimator;
        j["delta"] = st.delta;
        j["seed"] = st.seed;
        j["n_total"] = st.n_total;
        j["n_postselected"] = st.n_postselected;
        j["estimate"] = st.estimate;
        j["stderr"] = st.std_error;
        j["target"] = {st.target.real(), st.target.imag()};
        j["deviation"] = st.deviation;
        os << j.dump(2) << '\n';
        return os.str();
    }
    const BranchedPointerState state = prepare_device(s, delta, c.topology);
    write_shots_csv(os, sample_shots(state, c.basis, c.shots, c.seed), c.basis, state.config().topology,
                    state.coordinates());
    return os.str();
}

std::string cmd_scenario(const RunConfig& c) {
    if (c.subcommand == "list") {
        std::ostringstream os;
        for (const auto& n : builtin_names()) {
            os << fmt::format("{:<20} {}\n", n, builtin(n).description);
        }
        return os.str();
    }
    return scenario_to_json(resolve_scenario(c)) + "\n";
}

std::string cmd_report(const RunConfig& c) {
    const Report r = build_report(c.seed);
    return c.format == "markdown" || c.format == "md" ? report_to_markdown(r) : report_to_json(r);
}

template <typename E, typename Parse>
std::function<void(const std::string&)> setter(E& target, Parse parse, bool* flag = nullptr) {
    return [&target, parse, flag](const std::string& v) {
        target = parse(v);
        if (flag) {
            *flag = true;
        }
    };
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Weak values of nonlocal observables: scenarios, pointer models and estimators", "weakval"};
    app.require_subcommand(1);

    auto scenario_opt = [&](CLI::App* sub) {
        sub->add_option("--scenario", c.scenario, "builtin name or scenario JSON file");
        sub->add_option("--epsilon", c.epsilon, "epsilon for the epsilon_sum builtin");
        sub->add_option("--out", c.out, "output file (default stdout)");
    };
    auto device_opt = [&](CLI::App* sub) {
        sub->add_option("--delta", c.delta, "pointer width");
        sub->add_option_function<std::string>("--topology", setter(c.topology, parse_topology),
                                               "local-product | entangled-sum");
    };
    auto estimator_opt = [&](CLI::App* sub) {
        sub->add_option_function<std::string>("--estimator", setter(c.estimator, parse_estimator, &c.estimator_set),
                                              "direct | sum-rule | resch-steinberg | resch-lundeen");
    };
    auto sampling_opt = [&](CLI::App* sub) {
        sub->add_option("--shots", c.shots, "number of pre-selected trials");
        sub->add_option("--seed", c.seed, "random seed");
    };

    CLI::App* wv = app.add_subcommand("weakvalue", "weak values of the scenario observables");
    scenario_opt(wv);
    wv->add_option("--format", c.format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));

    CLI::App* abl = app.add_subcommand("abl", "ABL outcome probabilities for ideal intermediate measurements");
    scenario_opt(abl);

    CLI::App* mom = app.add_subcommand("moments", "pointer moments after post-selection");
    scenario_opt(mom);
    device_opt(mom);
    mom->add_flag("--oracle", c.oracle, "also evaluate the grid-quadrature oracle");

    CLI::App* sw = app.add_subcommand("sweep", "pointer expectation against delta for both devices (CSV)");
    scenario_opt(sw);
    estimator_opt(sw);
    sampling_opt(sw);
    sw->add_option("--delta-min", c.sweep.delta_min, "smallest delta");
    sw->add_option("--delta-max", c.sweep.delta_max, "largest delta");
    sw->add_option("--delta-points", c.sweep.points, "number of grid points");
    sw->add_flag("--log,!--linear", c.sweep.log_spaced, "log-spaced grid (default)");

    CLI::App* sa = app.add_subcommand("sample", "shot-level Monte Carlo (CSV dump, or JSON with --estimator)");
    scenario_opt(sa);
    device_opt(sa);
    estimator_opt(sa);
    sampling_opt(sa);
    sa->add_option_function<std::string>("--basis", setter(c.basis, parse_basis), "position | momentum");

    CLI::App* sc = app.add_subcommand("scenario", "builtin scenario catalogue");
    sc->require_subcommand(1);
    sc->add_subcommand("list", "list builtin scenarios");
    CLI::App* ex = sc->add_subcommand("export", "write a scenario as JSON");
    scenario_opt(ex);

    CLI::App* rep = app.add_subcommand("report", "reproduction report");
    rep->add_option("--format", c.format, "json | markdown")->check(CLI::IsMember({"json", "markdown", "md"}));
    std::uint64_t report_seed = kReportSeed;
    rep->add_option("--seed", report_seed, "seed for the sampled rows");
    rep->add_option("--out", c.out, "output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        CLI::App* chosen = app.get_subcommands().front();
        c.command = chosen->get_name();
        if (c.command == "scenario") {
            c.subcommand = chosen->get_subcommands().front()->get_name();
        }
        if (c.command == "report") {
            c.seed = report_seed;
        }
        c.validate();
        std::string text;
        if (c.command == "weakvalue") {
            text = cmd_weakvalue(c);
        } else if (c.command == "abl") {
            text = cmd_abl(c);
        } else if (c.command == "moments") {
            text = cmd_moments(c);
        } else if (c.command == "sweep") {
            text = cmd_sweep(c);
        } else if (c.command == "sample") {
            text = cmd_sample(c);
        } else if (c.command == "scenario") {
            text = cmd_scenario(c);
        } else {
            text = cmd_report(c);
        }
        emit(c, text, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PhysicsError& e) {
        err << "error: " << e.what() << '\n';
        return kExitPhysics;
    }
}

}  // namespace weakval
