#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "prophet/evaluation.hpp"
#include "prophet/families.hpp"
#include "prophet/io.hpp"
#include "prophet/policy.hpp"
#include "prophet/thresholds.hpp"

namespace prophet::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string instance_path;
    std::string order_arg;
    std::string orders_arg;
    std::string policy = "golden";
    std::string objective = "expectation";
    std::string method = "exact";
    std::uint64_t mc_samples = 0;
    std::uint64_t seed = 1;
    std::size_t perm_cap = 8;
    std::size_t state_cap = 50'000'000;
    std::size_t profile_cap = 1'000'000;
    unsigned threads = 0;
    std::string format = "json";
    double lambda_slack = MaxProbConfig{}.lambda_slack;
    bool unique_max = false;
    double baseline = 0.0;

    std::string family;
    double eps = -1.0;
    double step = 0.05;
    std::size_t n = 0;
    std::size_t T = 0;
    std::string emit_dir;

    EvalLimits limits() const { return {state_cap, profile_cap, perm_cap, threads}; }
};

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

void emit(std::ostream& out, const json& doc) { out << doc.dump(2) << "\n"; }

int cmd_constants(const RunConfig& cfg, std::ostream& out) {
    const Constants& c = constants();
    const double residual = c.lambda / (1.0 - c.lambda) - std::log(1.0 / c.lambda);
    if (cfg.format == "csv") {
        out << "name,value\n"
            << "phi," << fmt(c.phi) << "\n"
            << "inv_phi," << fmt(c.inv_phi) << "\n"
            << "lambda," << fmt(c.lambda) << "\n"
            << "ln_inv_lambda," << fmt(c.ln_inv_lambda) << "\n"
            << "lambda_residual," << fmt(residual) << "\n";
        return kExitOk;
    }
    emit(out, {{"phi", c.phi},
               {"inv_phi", c.inv_phi},
               {"lambda", c.lambda},
               {"ln_inv_lambda", c.ln_inv_lambda},
               {"lambda_residual", residual}});
    return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    const auto raw = io::parse_raw_boxes(json::parse(io::read_file(cfg.instance_path)));
    const ValidationReport report = validate_instance(raw, cfg.unique_max, cfg.baseline);
    json violations = json::array();
    for (const auto& v : report.violations) {
        json row{{"box", v.box}, {"message", v.message}};
        if (v.other_box) row["other_box"] = *v.other_box;
        violations.push_back(row);
    }
    emit(out, {{"valid", report.valid()}, {"boxes", raw.size()}, {"violations", violations}});
    return report.valid() ? kExitOk : kExitInput;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const Objective objective = Objective::parse(cfg.objective);
    const bool winprob = objective.kind == Objective::Kind::winprob;
    const Instance instance = io::load_instance(cfg.instance_path, winprob, objective.baseline);
    const Order order = io::resolve_order(cfg.order_arg, instance.size());
    const Policy policy = make_policy(parse_policy_spec(cfg.policy), instance, &order, cfg.lambda_slack);

    EvalResult result;
    if (cfg.mc_samples > 0) {
        result = monte_carlo(instance, order, policy, objective, cfg.mc_samples, cfg.seed, cfg.limits());
    } else if (cfg.method == "brute") {
        result = brute_force(instance, order, policy, objective, cfg.limits());
    } else {
        result = eval_exact(instance, order, policy, objective, cfg.limits());
    }

    if (cfg.format == "csv") {
        out << "value,method,samples,stderr\n"
            << fmt(result.value) << "," << to_string(result.method) << ","
            << (result.samples ? std::to_string(*result.samples) : "") << ","
            << (result.std_error ? fmt(*result.std_error) : "") << "\n";
        return kExitOk;
    }
    json doc = io::eval_json(result);
    doc["policy"] = policy.name();
    doc["objective"] = objective.to_string();
    doc["order"] = io::order_json(order)["order"];
    emit(out, doc);
    return kExitOk;
}

int cmd_ratio(const RunConfig& cfg, std::ostream& out) {
    const Objective objective = Objective::parse(cfg.objective);
    const bool winprob = objective.kind == Objective::Kind::winprob;
    const Instance instance = io::load_instance(cfg.instance_path, winprob, objective.baseline);
    const PolicySpec spec = parse_policy_spec(cfg.policy);
    if (spec.order_aware()) {
        throw std::invalid_argument("ratio compares an order-unaware policy against the order-aware optimum; '" +
                                    spec.text + "' is order-aware");
    }
    const Policy policy = make_policy(spec, instance, nullptr, cfg.lambda_slack);
    const BenchmarkKind benchmark = benchmark_for(objective);
    const RatioReport report =
        cfg.orders_arg.empty()
            ? order_ratio_sweep(instance, policy, objective, benchmark, cfg.limits())
            : order_ratio_sweep(instance, io::resolve_orders(cfg.orders_arg, instance.size()), policy, objective,
                                benchmark, cfg.limits());
    if (cfg.format == "csv") {
        out << io::ratio_csv(report);
        return kExitOk;
    }
    json doc = io::ratio_json(report);
    doc["policy"] = policy.name();
    doc["objective"] = objective.to_string();
    doc["benchmark"] = benchmark == BenchmarkKind::opt_expectation ? "opt-exp" : "opt-maxprob";
    emit(out, doc);
    return kExitOk;
}

void emit_family_files(const FamilyInstance& f, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    io::write_file(base / (f.family + "_instance.json"), io::instance_json(f.instance).dump(2) + "\n");
    json orders = json::array();
    json names = json::array();
    for (const auto& [name, order] : f.canonical_orders) {
        orders.push_back(io::order_json(order)["order"]);
        names.push_back(name);
    }
    io::write_file(base / (f.family + "_orders.json"), json{{"orders", orders}, {"names", names}}.dump(2) + "\n");
}

json family_header(const FamilyInstance& f) {
    json params = json::object();
    for (const auto& [k, v] : f.parameters) params[k] = v;
    return {{"family", f.family}, {"parameters", params}, {"boxes", f.instance.size()}};
}

// Runs `policy` against the matching optimum on every canonical order.
json reproduce_orders(const FamilyInstance& f, const Policy& policy, const Objective& objective,
                      const RunConfig& cfg, RatioReport& report) {
    std::vector<Order> orders;
    for (const auto& entry : f.canonical_orders) orders.push_back(entry.second);
    report = order_ratio_sweep(f.instance, orders, policy, objective, benchmark_for(objective), cfg.limits());
    json rows = json::array();
    for (std::size_t i = 0; i < report.per_order.size(); ++i) {
        const auto& row = report.per_order[i];
        rows.push_back({{"name", f.canonical_orders[i].first},
                        {"alg", row.alg},
                        {"opt", row.opt},
                        {"ratio", row.ratio},
                        {"degenerate", row.degenerate}});
    }
    json doc = family_header(f);
    doc["policy"] = policy.name();
    doc["objective"] = objective.to_string();
    doc["orders"] = rows;
    doc["min_ratio"] = report.min_ratio;
    doc["argmin_order"] = f.canonical_orders[report.argmin].first;
    doc["predicted_limit"] = f.predicted_limit;
    doc["limit_note"] = f.limit_note;
    doc["deviation"] = report.min_ratio - f.predicted_limit;
    return doc;
}

int cmd_reproduce(const RunConfig& cfg, std::ostream& out) {
    if (cfg.family == "single-threshold") {
        const SingleThresholdReport curve = single_threshold_ratio_curve(default_alpha_grid());
        if (cfg.format == "csv") {
            out << "alpha,alg,opt,ratio\n";
            for (const auto& p : curve.alpha_grid) {
                out << fmt(p.alpha) << "," << fmt(p.alg) << "," << fmt(p.opt) << "," << fmt(p.ratio) << "\n";
            }
            return kExitOk;
        }
        json doc{{"family", "single-threshold"}, {"alpha_star", curve.alpha_star}, {"max_ratio", curve.max_ratio}};
        const std::size_t n = cfg.n == 0 ? 10'000 : cfg.n;
        if (cfg.mc_samples > 0 || cfg.n > 0) {
            const std::size_t T = cfg.T > 0 ? cfg.T : threshold_for_alpha(n, curve.alpha_star);
            const FamilyInstance f = single_threshold_family(n, T);
            if (!cfg.emit_dir.empty()) emit_family_files(f, cfg.emit_dir);
            const Policy policy = Policy::single_threshold(static_cast<double>(T));
            const std::uint64_t samples = cfg.mc_samples > 0 ? cfg.mc_samples : 20'000;
            const EvalResult r = monte_carlo(f.instance, f.canonical_orders.front().second, policy,
                                             Objective::winprob(), samples, cfg.seed, cfg.limits());
            doc["instance"] = family_header(f);
            doc["threshold_policy"] = {{"T", T},
                                       {"alpha", f.parameters.at("alpha")},
                                       {"winprob", io::eval_json(r)},
                                       {"closed_form_alg", f.predicted_limit},
                                       {"deviation", r.value - f.predicted_limit}};
        }
        emit(out, doc);
        return kExitOk;
    }

    FamilyInstance f = [&] {
        if (cfg.family == "example1") return example1(cfg.eps > 0 ? cfg.eps : 1e-3);
        if (cfg.family == "golden-lb") return golden_lb(cfg.eps > 0 ? cfg.eps : 1e-4, cfg.step);
        if (cfg.family == "maxprob-lb") return maxprob_lb(cfg.n > 0 ? cfg.n : 200);
        throw std::invalid_argument("unknown family '" + cfg.family +
                                    "' (expected example1, golden-lb, maxprob-lb, single-threshold)");
    }();
    if (!cfg.emit_dir.empty()) emit_family_files(f, cfg.emit_dir);

    const bool maxprob = f.family == "maxprob-lb";
    const Objective objective = maxprob ? Objective::winprob() : Objective::expectation();
    const Policy policy = maxprob ? Policy::maxprob(f.instance, {0.0, cfg.lambda_slack}) : Policy::golden(f.instance);
    RatioReport report;
    json doc = reproduce_orders(f, policy, objective, cfg, report);
    if (maxprob) {
        // win probability of taking the deterministic 1/2: every random box empty
        double all_empty = 1.0;
        for (BoxId id = 1; id < f.instance.size(); ++id) all_empty *= f.instance.box(id).prob_below(0.5, true);
        doc["accept_branch_winprob"] = all_empty;
        doc["lambda"] = constants().lambda;
    }
    if (cfg.format == "csv") {
        out << io::ratio_csv(report);
        return kExitOk;
    }
    emit(out, doc);
    return kExitOk;
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    cmd->add_option("--lambda-slack", cfg.lambda_slack, "slack on the P >= lambda test of maxprob");
    cmd->add_option("--state-cap", cfg.state_cap, "cap on prefix states x positions for exact DPs");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Order-unaware prophet policies, exact evaluators and order-ratio sweeps", "prophet"};
    app.require_subcommand(1);

    auto* constants_cmd = app.add_subcommand("constants", "print phi, 1/phi, lambda and ln(1/lambda)");
    constants_cmd->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));

    auto* validate_cmd = app.add_subcommand("validate", "check an instance file against all invariants");
    validate_cmd->add_option("-i,--instance", cfg.instance_path)->required();
    validate_cmd->add_flag("--unique-max", cfg.unique_max, "require disjoint supports above the baseline");
    validate_cmd->add_option("--baseline", cfg.baseline);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "value of one policy under one order");
    evaluate_cmd->add_option("-i,--instance", cfg.instance_path)->required();
    evaluate_cmd->add_option("-o,--order", cfg.order_arg, "ids like 0,2,1 or an order file")->required();
    evaluate_cmd->add_option("-p,--policy", cfg.policy)->required();
    evaluate_cmd->add_option("--obj", cfg.objective, "expectation | winprob[:theta]")->required();
    evaluate_cmd->add_option("--mc", cfg.mc_samples, "Monte Carlo samples instead of the exact DP");
    evaluate_cmd->add_option("--seed", cfg.seed);
    evaluate_cmd->add_option("--method", cfg.method, "exact or brute")->check(CLI::IsMember({"exact", "brute"}));
    evaluate_cmd->add_option("--profile-cap", cfg.profile_cap);
    add_common(evaluate_cmd, cfg);

    auto* ratio_cmd = app.add_subcommand("ratio", "order competitive ratio over all or listed orders");
    ratio_cmd->add_option("-i,--instance", cfg.instance_path)->required();
    ratio_cmd->add_option("-p,--policy", cfg.policy)->required();
    ratio_cmd->add_option("--obj", cfg.objective)->required();
    ratio_cmd->add_option("--orders", cfg.orders_arg, "0,1,2;2,1,0 or a file with an \"orders\" array");
    ratio_cmd->add_option("--perm-cap", cfg.perm_cap);
    add_common(ratio_cmd, cfg);

    auto* reproduce_cmd = app.add_subcommand("reproduce", "run a lower-bound family");
    reproduce_cmd->add_option("family", cfg.family, "example1 | golden-lb | maxprob-lb | single-threshold")
        ->required();
    reproduce_cmd->add_option("--eps", cfg.eps);
    reproduce_cmd->add_option("--step", cfg.step);
    reproduce_cmd->add_option("--n", cfg.n);
    reproduce_cmd->add_option("--T", cfg.T);
    reproduce_cmd->add_option("--mc", cfg.mc_samples);
    reproduce_cmd->add_option("--seed", cfg.seed);
    reproduce_cmd->add_option("--emit-dir", cfg.emit_dir, "write the family instance and orders here");
    add_common(reproduce_cmd, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*constants_cmd) return cmd_constants(cfg, out);
        if (*validate_cmd) return cmd_validate(cfg, out);
        if (*evaluate_cmd) return cmd_evaluate(cfg, out);
        if (*ratio_cmd) return cmd_ratio(cfg, out);
        if (*reproduce_cmd) return cmd_reproduce(cfg, out);
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInput;
    } catch (const json::exception& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace prophet::cli
