// Command-line front door: compare two distribution specs at fixed t, sweep
// a family over a t-grid with order verdicts, or run a named fixture against
// its expected values.
//
// Exit codes: 0 success, 1 expectation failure, 2 input error, 3 numeric
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochord/asym.hpp"
#include "stochord/cdf.hpp"
#include "stochord/fixtures.hpp"
#include "stochord/order.hpp"

namespace {

using namespace stochord;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw SpecError("cannot open output file: " + path);
    out << text;
}

// "t0:factor:count" -> grid; t0 = 0 shifts the geometric ladder so that it
// still spans decades (t_k = factor^k - 1).
std::vector<double> parse_grid(const std::string& text) {
    double t0 = 0.0, factor = 0.0;
    int count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &t0, &factor, &count) != 3)
        throw SpecError("grid must be given as t0:factor:count");
    if (count < 1 || !(factor > 1.0)) throw SpecError("grid needs count >= 1 and factor > 1");
    std::vector<double> g;
    if (t0 > 0.0) {
        g = geometric_grid(t0, factor, count);
    } else {
        double t = 1.0;
        for (int i = 0; i < count; ++i) { g.push_back(t - 1.0); t *= factor; }
    }
    return g;
}

std::vector<OrderKind> parse_orders(const std::string& text) {
    std::vector<OrderKind> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "ast") out.push_back(OrderKind::Ast);
        else if (item == "asp") out.push_back(OrderKind::Asp);
        else if (item == "l1") out.push_back(OrderKind::L1);
        else if (item == "wp") out.push_back(OrderKind::Wp);
        else throw SpecError("unknown order '" + item + "' (expected ast,asp,l1,wp)");
    }
    if (out.empty()) throw SpecError("no orders selected");
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"asymptotic stochastic order diagnostics"};
    app.require_subcommand(1);

    std::string x_path, y_path, fixture_name, grid_text, orders_text = "ast,asp,l1,wp";
    std::string out_path;
    double t_value = 0.0, p_value = 2.0;
    std::uint64_t seed = 42;
    Rule rule;

    auto* cmp = app.add_subcommand("compare", "diagnostics for one pair at fixed t");
    cmp->add_option("--x", x_path, "distribution spec JSON for X")->required();
    cmp->add_option("--y", y_path, "distribution spec JSON for Y")->required();
    cmp->add_option("--t", t_value, "parameter value");
    cmp->add_option("--p", p_value, "Wasserstein exponent");
    cmp->add_option("--seed", seed, "random seed");
    cmp->add_option("--out", out_path, "also write the report JSON here");

    auto* swp = app.add_subcommand("sweep", "diagnostics over a t-grid with verdicts");
    swp->add_option("--x", x_path, "distribution spec JSON for X");
    swp->add_option("--y", y_path, "distribution spec JSON for Y");
    swp->add_option("--fixture", fixture_name, "named fixture family");
    swp->add_option("--grid", grid_text, "t-grid as t0:factor:count");
    swp->add_option("--order", orders_text, "orders to judge (comma list of ast,asp,l1,wp)");
    swp->add_option("--p", p_value, "Wasserstein exponent");
    swp->add_option("--seed", seed, "random seed");
    swp->add_option("--out", out_path, "CSV output path");
    swp->add_option("--rule-theta-hold", rule.theta_hold, "hold threshold");
    swp->add_option("--rule-theta-fail", rule.theta_fail, "fail threshold");

    auto* fix = app.add_subcommand("fixture", "run a named fixture against expected values");
    fix->add_option("--fixture", fixture_name, "fixture name")->required();
    fix->add_option("--p", p_value, "Wasserstein exponent");
    fix->add_option("--seed", seed, "random seed");
    fix->add_option("--rule-theta-hold", rule.theta_hold, "hold threshold");
    fix->add_option("--rule-theta-fail", rule.theta_fail, "fail threshold");

    CLI11_PARSE(app, argc, argv);

    if (cmp->parsed()) {
        Cdf fx = Cdf::load(read_file(x_path));
        Cdf fy = Cdf::load(read_file(y_path));
        fx.validate(t_value);
        fy.validate(t_value);
        PartialDistances d = partial_distances(fx, fy, t_value, p_value);
        OrderReport r;
        r.t = t_value;
        r.measure = d.measure;
        r.l1_partial = d.l1_partial;
        r.l1_divergent = d.l1_divergent;
        r.wp_partial = d.wp_partial;
        r.wp_divergent = d.wp_divergent;
        r.p = p_value;
        r.precedence = precedence_prob(fx, fy, t_value);
        std::string text = report_to_json(r).dump(2);
        std::cout << text << "\n";
        if (!out_path.empty()) write_file(out_path, text + "\n");
        return 0;
    }

    if (swp->parsed()) {
        ProcessFamily fam;
        std::vector<double> grid;
        if (!fixture_name.empty()) {
            Fixture f = get_fixture(fixture_name);
            fam = f.family;
            grid = f.family.default_grid;
        } else if (!x_path.empty() && !y_path.empty()) {
            Cdf fx = Cdf::load(read_file(x_path));
            Cdf fy = Cdf::load(read_file(y_path));
            fam.at = [fx, fy](double) { return std::make_pair(fx, fy); };
            grid = geometric_grid(1.0, 2.0, 13);
        } else {
            throw SpecError("sweep needs either --fixture or both --x and --y");
        }
        if (!grid_text.empty()) grid = parse_grid(grid_text);
        if (grid.empty()) throw SpecError("empty grid");
        std::vector<OrderReport> reports = sweep(fam, grid, p_value);
        std::string csv = reports_to_csv(reports);
        if (!out_path.empty()) write_file(out_path, csv);
        else std::cout << csv;
        nlohmann::json verdicts = nlohmann::json::array();
        for (OrderKind o : parse_orders(orders_text))
            verdicts.push_back(verdict_to_json(judge_reports(reports, o, rule)));
        std::cout << verdicts.dump(2) << "\n";
        return 0;
    }

    // fixture
    Fixture f = get_fixture(fixture_name);
    FixtureResult res = run_fixture(f, p_value, rule);
    for (const auto& row : res.rows) {
        std::printf("%-4s %-70s expected %-14.8g actual %-14.8g\n", row.pass ? "PASS" : "FAIL",
                    row.description.c_str(), row.expected, row.actual);
    }
    std::printf("%s: %s\n", res.name.c_str(), res.all_pass ? "all expectations met" : "FAILED");
    return res.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const stochord::SpecError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const stochord::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
