// Command-line front end: annulus modulus and condenser capacity solves,
// ring-inequality verification, the capacity bound, and the equicontinuity
// criteria (mean oscillation, divergence integral, log-power growth, L^s
// route, the experiment harness, and the joining-continua bound).
//
// Exit codes: 0 = pass / expected verdict, 2 = fail / unexpected verdict,
// 3 = inconclusive, 1 = usage or runtime error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "modp/condenser.hpp"
#include "modp/criteria.hpp"
#include "modp/distance.hpp"
#include "modp/mapping.hpp"
#include "modp/modulus.hpp"
#include "modp/ringmap.hpp"
#include "modp/util.hpp"

using namespace modp;

namespace {

// ---------------------------------------------------------------------------
// Shared flag bundles

struct ChartArgs {
  std::string config;    // chart config file; overrides dim/box-half
  int dim = 2;
  double box_half = 1.1;
  std::string x0;        // comma-separated center, default origin
};

void add_chart_flags(CLI::App* cmd, ChartArgs& args) {
  cmd->add_option("--chart", args.config,
                  "chart config file (key = value lines; overrides --dim/--box-half)");
  cmd->add_option("--dim", args.dim, "chart dimension (euclidean default chart)")
      ->check(CLI::Range(2, 4));
  cmd->add_option("--box-half", args.box_half,
                  "half-width of the default euclidean box");
  cmd->add_option("--x0", args.x0, "center point, comma separated (default origin)");
}

Vec parse_point(const std::string& text, int dim) {
  Vec v = Vec::Zero(dim);
  if (text.empty()) return v;
  std::stringstream ss(text);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',')) {
    if (i >= dim) throw config_error("point has more coordinates than the chart");
    v[i++] = std::stod(tok);
  }
  if (i != dim) throw config_error("point has fewer coordinates than the chart");
  return v;
}

MetricChart make_chart(const ChartArgs& args) {
  if (!args.config.empty()) return MetricChart::from_config(args.config);
  return MetricChart::euclidean(args.dim, Box::cube(args.dim, args.box_half));
}

// Q field from an inline expression or "@file" holding one.
QField make_q(const std::string& text) {
  std::string expr = text;
  if (!expr.empty() && expr[0] == '@') {
    std::ifstream in(expr.substr(1));
    if (!in) throw config_error("cannot open Q file " + expr.substr(1));
    std::ostringstream ss;
    ss << in.rdbuf();
    expr = ss.str();
    while (!expr.empty() && std::isspace(static_cast<unsigned char>(expr.back())))
      expr.pop_back();
  }
  return QField::expression(expr);
}

struct LadderArgs {
  double eps_max = 1.0;
  int rungs = 12;
  double ratio = 0.5;
};

void add_ladder_flags(CLI::App* cmd, LadderArgs& args) {
  cmd->add_option("--ladder-max", args.eps_max, "ladder start (first rung is max*ratio)");
  cmd->add_option("--rungs", args.rungs, "number of ladder rungs");
  cmd->add_option("--ladder-ratio", args.ratio, "geometric ratio of the ladder");
}

struct SolveArgs {
  double tol = 1e-4;
  int polish = -1;
  long max_iters = 100000;
  std::string log_csv;
};

void add_solver_flags(CLI::App* cmd, SolveArgs& args) {
  cmd->add_option("--tol", args.tol, "relative duality-gap target of the solver");
  cmd->add_option("--polish", args.polish,
                  "active-set polish: -1 auto, 0 never, 1 always");
  cmd->add_option("--max-iters", args.max_iters, "first-order iteration cap");
  cmd->add_option("--solver-log", args.log_csv,
                  "per-iteration CSV (iteration,objective,max_violation,duality_gap)");
}

SolveOptions make_solve(const SolveArgs& args) {
  SolveOptions s;
  s.tol = args.tol;
  s.polish = args.polish;
  s.max_iters = args.max_iters;
  s.log_csv = args.log_csv;
  return s;
}

// Mapping selection shared by verify-ring / cap-bound.
struct MapArgs {
  std::string kind = "identity";  // identity | stretch | analytic
  double alpha = 0.5;
  std::vector<std::string> components;
};

void add_map_flags(CLI::App* cmd, MapArgs& args) {
  cmd->add_option("--map", args.kind, "identity | stretch | analytic")
      ->check(CLI::IsMember({"identity", "stretch", "analytic"}));
  cmd->add_option("--alpha", args.alpha, "stretch exponent in (0, 1]");
  cmd->add_option("--component", args.components,
                  "analytic component expression, once per coordinate");
}

MappingSpec make_map(const MapArgs& args, const MetricChart& chart, const Vec& x0) {
  if (args.kind == "identity") return MappingSpec::identity(chart);
  if (args.kind == "stretch")
    return MappingSpec::radial_stretch(chart, args.alpha, x0);
  if (args.components.empty())
    throw config_error("analytic map needs --component per coordinate");
  return MappingSpec::user_analytic(chart, chart, args.components);
}

int expected_exit(const std::string& got, const std::string& expect,
                  bool pass_default, bool inconclusive) {
  if (!expect.empty()) {
    std::string g = got, e = expect;
    for (auto& c : g) c = static_cast<char>(std::tolower(c));
    for (auto& c : e) c = static_cast<char>(std::tolower(c));
    return g == e ? 0 : 2;
  }
  if (inconclusive) return 3;
  return pass_default ? 0 : 2;
}

const char* fmo_name(FmoVerdict v) {
  switch (v) {
    case FmoVerdict::FMO: return "FMO";
    case FmoVerdict::NotFMO: return "NotFMO";
    default: return "Inconclusive";
  }
}

const char* div_name(DivergenceVerdict v) {
  switch (v) {
    case DivergenceVerdict::Divergent: return "Divergent";
    case DivergenceVerdict::Convergent: return "Convergent";
    default: return "Inconclusive";
  }
}

const char* ls_name(LsVerdict v) {
  switch (v) {
    case LsVerdict::Pass: return "Pass";
    case LsVerdict::NotApplicable: return "NotApplicable";
    default: return "Inconclusive";
  }
}

std::vector<Vec> parse_polyline(const std::string& text, int dim) {
  std::vector<Vec> pts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ';')) pts.push_back(parse_point(tok, dim));
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-moduli of curve families, condenser capacities and "
               "equicontinuity criteria on chart-sampled manifolds"};
  app.require_subcommand(1);
  std::cout.precision(10);

  int exit_code = 0;

  // ------------------------------------------------------------------ modulus
  {
    auto* cmd = app.add_subcommand(
        "modulus", "p-modulus of the curve family joining two geodesic spheres");
    auto chart_args = std::make_shared<ChartArgs>();
    auto solve_args = std::make_shared<SolveArgs>();
    auto r1 = std::make_shared<double>(1.0);
    auto r2 = std::make_shared<double>(std::exp(1.0));
    auto p = std::make_shared<double>(2.0);
    auto res = std::make_shared<int>(256);
    auto count = std::make_shared<int>(4096);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto expect = std::make_shared<double>(0.0);
    auto rtol = std::make_shared<double>(0.05);
    auto density_csv = std::make_shared<std::string>();
    chart_args->box_half = 2.9;
    add_chart_flags(cmd, *chart_args);
    add_solver_flags(cmd, *solve_args);
    cmd->add_option("--r1", *r1, "inner sphere radius");
    cmd->add_option("--r2", *r2, "outer sphere radius");
    cmd->add_option("--p", *p, "modulus exponent, > 1");
    cmd->add_option("--res", *res, "grid resolution per axis");
    cmd->add_option("--curves", *count, "sampled curve count");
    cmd->add_option("--seed", *seed, "sampling seed");
    auto* expect_opt =
        cmd->add_option("--expect", *expect, "reference value to compare against");
    cmd->add_option("--rtol", *rtol, "relative tolerance for --expect");
    cmd->add_option("--density-csv", *density_csv,
                    "write the extremal density grid as CSV");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      GridDomain grid(chart, *res);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      GeodesicAnnulus ann(chart, x0, *r1, *r2);
      auto fam = generate_annulus_family(ann, *count, *seed);
      auto result = compute_modulus(fam, *p, grid, make_solve(*solve_args));
      std::cout << "modulus = " << result.value
                << "  (duality gap " << result.duality_gap << ", "
                << result.iterations << " iterations, converged "
                << (result.converged ? "yes" : "no") << ")\n";
      if (!density_csv->empty()) {
        std::ofstream out(*density_csv);
        out.precision(17);
        out << "cell,rho\n";
        for (std::size_t c = 0; c < result.density.values.size(); ++c)
          out << c << ',' << result.density.values[c] << '\n';
      }
      if (expect_opt->count() > 0) {
        const double rel = std::abs(result.value - *expect) /
                           std::max(std::abs(*expect), 1e-300);
        std::cout << "expected " << *expect << ", relative deviation " << rel
                  << " (tolerance " << *rtol << ")\n";
        exit_code = rel <= *rtol ? 0 : 2;
      }
    });
  }

  // ----------------------------------------------------------------- capacity
  {
    auto* cmd = app.add_subcommand(
        "capacity", "p-capacity of the ball condenser (B(x0,eps0), B(x0,eps))");
    auto chart_args = std::make_shared<ChartArgs>();
    auto solve_args = std::make_shared<SolveArgs>();
    auto eps = std::make_shared<double>(std::exp(-1.0));
    auto eps0 = std::make_shared<double>(1.0);
    auto p = std::make_shared<double>(2.0);
    auto res = std::make_shared<int>(256);
    auto count = std::make_shared<int>(4096);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto expect = std::make_shared<double>(0.0);
    auto rtol = std::make_shared<double>(0.05);
    add_chart_flags(cmd, *chart_args);
    add_solver_flags(cmd, *solve_args);
    cmd->add_option("--eps", *eps, "radius of the compact plate C");
    cmd->add_option("--eps0", *eps0, "radius of the open host ball A");
    cmd->add_option("--p", *p, "capacity exponent, > 1");
    cmd->add_option("--res", *res, "grid resolution per axis");
    cmd->add_option("--curves", *count, "sampled curve count");
    cmd->add_option("--seed", *seed, "sampling seed");
    auto* expect_opt =
        cmd->add_option("--expect", *expect, "reference value to compare against");
    cmd->add_option("--rtol", *rtol, "relative tolerance for --expect");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      GridDomain grid(chart, *res);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      Condenser cond(chart, x0, *eps, *eps0);
      auto result = capacity(cond, *p, grid, *count, *seed, make_solve(*solve_args));
      std::cout << "capacity = " << result.value << "  (duality gap "
                << result.duality_gap << ")\n";
      if (expect_opt->count() > 0) {
        const double rel = std::abs(result.value - *expect) /
                           std::max(std::abs(*expect), 1e-300);
        std::cout << "expected " << *expect << ", relative deviation " << rel
                  << " (tolerance " << *rtol << ")\n";
        exit_code = rel <= *rtol ? 0 : 2;
      }
    });
  }

  // -------------------------------------------------------------- verify-ring
  {
    auto* cmd = app.add_subcommand(
        "verify-ring",
        "check M_p(f(annulus family)) <= integral of Q eta^p per competitor eta");
    auto chart_args = std::make_shared<ChartArgs>();
    auto solve_args = std::make_shared<SolveArgs>();
    auto map_args = std::make_shared<MapArgs>();
    auto q_text = std::make_shared<std::string>("1");
    auto p = std::make_shared<double>(2.0);
    auto r1 = std::make_shared<double>(1.0);
    auto r2 = std::make_shared<double>(std::exp(1.0));
    auto count = std::make_shared<int>(2048);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto res = std::make_shared<int>(192);
    auto verdict_tol = std::make_shared<double>(0.02);
    auto weighted = std::make_shared<bool>(false);
    auto report = std::make_shared<std::string>();
    chart_args->box_half = 2.9;
    add_chart_flags(cmd, *chart_args);
    add_solver_flags(cmd, *solve_args);
    add_map_flags(cmd, *map_args);
    cmd->add_option("--q", *q_text, "weight Q expression (or @file)");
    cmd->add_option("--p", *p, "exponent, > 1");
    cmd->add_option("--r1", *r1, "inner sphere radius");
    cmd->add_option("--r2", *r2, "outer sphere radius");
    cmd->add_option("--curves", *count, "sampled curve count");
    cmd->add_option("--seed", *seed, "sampling seed");
    cmd->add_option("--res", *res, "target grid resolution");
    cmd->add_option("--verdict-tol", *verdict_tol, "slack accepted on LHS <= RHS");
    cmd->add_flag("--weighted-extremal", *weighted,
                  "weight the extremal competitor by the spherical mean of Q");
    cmd->add_option("--report", *report, "pass/fail CSV per eta");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      auto f = make_map(*map_args, chart, x0);
      auto Q = make_q(*q_text);
      GridDomain grid(f.target(), *res);
      std::function<double(double)> weight;
      if (*weighted) {
        RadialGauge gauge(chart, x0);
        weight = [Q, gauge](double t) { return spherical_mean_q(Q, gauge, t); };
      }
      auto etas = standard_eta_battery(*r1, *r2, chart.dim(), *p, *seed, weight);
      auto rep = verify_ring_inequality(f, x0, Q, *p, *r1, *r2, etas, grid,
                                        *count, *seed, *verdict_tol,
                                        make_solve(*solve_args), *report);
      for (const auto& row : rep.rows)
        std::cout << row.eta << ": LHS " << row.lhs << " vs RHS " << row.rhs
                  << " -> " << (row.pass ? "pass" : "FAIL") << "\n";
      std::cout << "verdict: " << (rep.all_pass ? "Pass" : "Fail") << "\n";
      exit_code = rep.all_pass ? 0 : 2;
    });
  }

  // ---------------------------------------------------------------- cap-bound
  {
    auto* cmd = app.add_subcommand(
        "cap-bound",
        "capacity of the image condenser vs the weighted profile bound F/I^p");
    auto chart_args = std::make_shared<ChartArgs>();
    auto solve_args = std::make_shared<SolveArgs>();
    auto map_args = std::make_shared<MapArgs>();
    auto q_text = std::make_shared<std::string>("1");
    auto p = std::make_shared<double>(2.0);
    auto eps_list = std::make_shared<std::vector<double>>();
    auto eps0 = std::make_shared<double>(0.1);
    auto psi_kind = std::make_shared<std::string>("log-power");
    auto psi_r1 = std::make_shared<double>(0.0);
    auto psi_r2 = std::make_shared<double>(0.0);
    auto psi_weight = std::make_shared<std::string>("1");
    auto count = std::make_shared<int>(2048);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto res = std::make_shared<int>(256);
    auto verdict_tol = std::make_shared<double>(0.02);
    auto report = std::make_shared<std::string>();
    add_chart_flags(cmd, *chart_args);
    add_solver_flags(cmd, *solve_args);
    add_map_flags(cmd, *map_args);
    cmd->add_option("--q", *q_text, "weight Q expression (or @file)");
    cmd->add_option("--p", *p, "exponent, > 1");
    cmd->add_option("--eps", *eps_list, "inner radius, repeatable")->required();
    cmd->add_option("--eps0", *eps0, "outer radius");
    cmd->add_option("--psi", *psi_kind, "log-power | reciprocal | weighted-inverse")
        ->check(CLI::IsMember({"log-power", "reciprocal", "weighted-inverse"}));
    cmd->add_option("--psi-r1", *psi_r1, "weighted-inverse support start");
    cmd->add_option("--psi-r2", *psi_r2, "weighted-inverse support end");
    cmd->add_option("--psi-weight", *psi_weight,
                    "weighted-inverse radial weight, expression in x");
    cmd->add_option("--curves", *count, "sampled curve count");
    cmd->add_option("--seed", *seed, "sampling seed");
    cmd->add_option("--res", *res, "target grid resolution");
    cmd->add_option("--verdict-tol", *verdict_tol, "slack accepted on LHS <= RHS");
    cmd->add_option("--report", *report, "CSV report path");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      auto f = make_map(*map_args, chart, x0);
      auto Q = make_q(*q_text);
      PsiFamily psi = PsiFamily::log_power(chart.dim(), *p);
      if (*psi_kind == "reciprocal") {
        psi = PsiFamily::reciprocal();
      } else if (*psi_kind == "weighted-inverse") {
        Expr w = Expr::parse(*psi_weight);
        psi = PsiFamily::weighted_inverse(
            chart.dim(), *p, *psi_r1, *psi_r2,
            [w](double t) { return w.eval(std::span<const double>(&t, 1)); });
      }
      Condenser cond(chart, x0, eps_list->front(), *eps0);
      CapacityBoundOptions opts;
      opts.count = *count;
      opts.seed = *seed;
      opts.tol = *verdict_tol;
      opts.resolution = *res;
      opts.solve = make_solve(*solve_args);
      opts.report_csv = *report;
      auto rep = check_capacity_bound(f, cond, Q, *p, psi, *eps_list, opts);
      for (const auto& row : rep.rows)
        std::cout << "eps " << row.eps << ": LHS " << row.lhs << " vs RHS "
                  << row.rhs << " -> " << (row.pass ? "pass" : "FAIL") << "\n";
      if (rep.degenerate_q)
        std::cout << "degenerate weight: RHS vanished on some rung\n";
      std::cout << "verdict: " << (rep.all_pass ? "Pass" : "Fail")
                << " (LHS decreasing: " << (rep.lhs_decreasing ? "yes" : "no")
                << ")\n";
      exit_code = rep.all_pass ? 0 : 2;
    });
  }

  // ---------------------------------------------------------------- check-fmo
  {
    auto* cmd = app.add_subcommand(
        "check-fmo", "mean-oscillation classification of Q at x0");
    auto chart_args = std::make_shared<ChartArgs>();
    auto ladder_args = std::make_shared<LadderArgs>();
    auto q_text = std::make_shared<std::string>("1");
    auto res = std::make_shared<int>(128);
    auto report = std::make_shared<std::string>();
    auto expect = std::make_shared<std::string>();
    add_chart_flags(cmd, *chart_args);
    add_ladder_flags(cmd, *ladder_args);
    cmd->add_option("--q", *q_text, "weight Q expression (or @file)");
    cmd->add_option("--res", *res, "grid resolution (sets the clamp radius)");
    cmd->add_option("--report", *report, "CSV report path (eps,mean,m)");
    cmd->add_option("--expect", *expect, "expected verdict: FMO | NotFMO | Inconclusive");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      GridDomain grid(chart, *res);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      auto ladder = make_eps_ladder(ladder_args->eps_max, ladder_args->rungs,
                                    ladder_args->ratio);
      auto rep = check_fmo(make_q(*q_text), x0, grid, ladder);
      if (!report->empty()) rep.write_csv(*report);
      std::cout << "m(eps) head " << rep.m.front() << ", tail " << rep.m.back()
                << ", fitted slope " << rep.slope
                << (rep.clamped ? " (clamped)" : "") << "\n";
      std::cout << "verdict: " << fmo_name(rep.verdict) << "\n";
      exit_code = expected_exit(fmo_name(rep.verdict), *expect,
                                rep.verdict == FmoVerdict::FMO,
                                rep.verdict == FmoVerdict::Inconclusive);
    });
  }

  // --------------------------------------------------------- check-divergence
  {
    auto* cmd = app.add_subcommand(
        "check-divergence",
        "divergence of the inverse spherical-mean integral of Q at x0");
    auto chart_args = std::make_shared<ChartArgs>();
    auto ladder_args = std::make_shared<LadderArgs>();
    auto q_text = std::make_shared<std::string>("1");
    auto p = std::make_shared<double>(2.0);
    auto delta = std::make_shared<double>(0.5);
    auto report = std::make_shared<std::string>();
    auto expect = std::make_shared<std::string>();
    chart_args->box_half = 0.6;
    ladder_args->eps_max = 0.5;
    ladder_args->rungs = 16;
    add_chart_flags(cmd, *chart_args);
    add_ladder_flags(cmd, *ladder_args);
    cmd->add_option("--q", *q_text, "weight Q expression (or @file); floored at 1");
    cmd->add_option("--p", *p, "exponent, > 1");
    cmd->add_option("--delta", *delta, "upper integration radius");
    cmd->add_option("--report", *report, "CSV report path (eps,T)");
    cmd->add_option("--expect", *expect,
                    "expected verdict: Divergent | Convergent | Inconclusive");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      auto ladder = make_eps_ladder(ladder_args->eps_max, ladder_args->rungs,
                                    ladder_args->ratio);
      auto rep = check_divergence_criterion(make_q(*q_text), x0, *p,
                                            chart.dim(), *delta, ladder, chart);
      if (!report->empty()) rep.write_csv(*report);
      std::cout << "T(eps): first " << rep.T.front() << ", last " << rep.T.back()
                << "\n";
      std::cout << "verdict: " << div_name(rep.verdict) << "\n";
      exit_code = expected_exit(div_name(rep.verdict), *expect,
                                rep.verdict == DivergenceVerdict::Divergent,
                                rep.verdict == DivergenceVerdict::Inconclusive);
    });
  }

  // ----------------------------------------------------------------- check-ls
  {
    auto* cmd = app.add_subcommand(
        "check-ls", "L^s-integrability route: Hoelder split of the ring integral");
    auto chart_args = std::make_shared<ChartArgs>();
    auto ladder_args = std::make_shared<LadderArgs>();
    auto q_text = std::make_shared<std::string>("1");
    auto p = std::make_shared<double>(1.5);
    auto s = std::make_shared<double>(4.0);
    auto eps0 = std::make_shared<double>(0.5);
    auto res = std::make_shared<int>(128);
    auto report = std::make_shared<std::string>();
    auto expect = std::make_shared<std::string>();
    ladder_args->eps_max = 0.1;
    ladder_args->rungs = 6;
    add_chart_flags(cmd, *chart_args);
    add_ladder_flags(cmd, *ladder_args);
    cmd->add_option("--q", *q_text, "weight Q expression (or @file)");
    cmd->add_option("--p", *p, "exponent in (1, n)");
    cmd->add_option("--s", *s, "norm exponent, >= n/(n-p)");
    cmd->add_option("--eps0", *eps0, "outer radius of the tested rings");
    cmd->add_option("--res", *res, "grid resolution for the norm sum");
    cmd->add_option("--report", *report, "CSV report path (eps,radial,I,ratio)");
    cmd->add_option("--expect", *expect,
                    "expected verdict: Pass | NotApplicable | Inconclusive");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      GridDomain grid(chart, *res);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      auto ladder = make_eps_ladder(ladder_args->eps_max, ladder_args->rungs,
                                    ladder_args->ratio);
      auto rep = check_ls_criterion(make_q(*q_text), x0, chart.dim(), *p, *s,
                                    *eps0, ladder, grid);
      if (!report->empty()) rep.write_csv(*report);
      std::cout << "||Q||_s = " << rep.q_norm << " (refine ratio "
                << rep.refine_ratio << ")\n";
      std::cout << "verdict: " << ls_name(rep.verdict) << "\n";
      exit_code = expected_exit(ls_name(rep.verdict), *expect,
                                rep.verdict == LsVerdict::Pass,
                                rep.verdict == LsVerdict::Inconclusive);
    });
  }

  // --------------------------------------------------------------- log-growth
  {
    auto* cmd = app.add_subcommand(
        "log-growth",
        "growth of the log-power profile integral F against log log(1/eps)");
    auto chart_args = std::make_shared<ChartArgs>();
    auto ladder_args = std::make_shared<LadderArgs>();
    auto q_text = std::make_shared<std::string>("1");
    auto p = std::make_shared<double>(2.0);
    auto eps0 = std::make_shared<double>(0.1);
    auto report = std::make_shared<std::string>();
    auto expect = std::make_shared<std::string>();
    ladder_args->eps_max = 0.1;
    ladder_args->rungs = 6;
    ladder_args->ratio = 0.1;
    add_chart_flags(cmd, *chart_args);
    add_ladder_flags(cmd, *ladder_args);
    cmd->add_option("--q", *q_text, "weight Q expression (or @file)");
    cmd->add_option("--p", *p, "profile exponent");
    cmd->add_option("--eps0", *eps0, "outer radius, < 1");
    cmd->add_option("--report", *report,
                    "CSV report path (eps,F,I,F_over_loglog,F_over_Ip,F_over_I)");
    cmd->add_option("--expect", *expect, "expected verdict: Pass | Fail");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      auto ladder = make_eps_ladder(ladder_args->eps_max, ladder_args->rungs,
                                    ladder_args->ratio);
      auto rep = log_power_growth_check(make_q(*q_text), x0, chart.dim(), *p,
                                        *eps0, ladder, chart);
      if (!report->empty()) rep.write_csv(*report);
      std::cout << "F/loglog bounded: " << (rep.loglog_bounded ? "yes" : "no")
                << ", F/I^p tail decreasing: "
                << (rep.tail_decreasing ? "yes" : "no") << "\n";
      std::cout << "verdict: " << (rep.pass ? "Pass" : "Fail") << "\n";
      exit_code = expected_exit(rep.pass ? "Pass" : "Fail", *expect, rep.pass,
                                false);
    });
  }

  // ----------------------------------------------------------- equicontinuity
  {
    auto* cmd = app.add_subcommand(
        "equicontinuity",
        "modulus-of-continuity experiment over a radial-stretch family");
    auto chart_args = std::make_shared<ChartArgs>();
    auto ladder_args = std::make_shared<LadderArgs>();
    auto alphas = std::make_shared<std::vector<double>>();
    auto budget = std::make_shared<std::string>("3.3334");
    auto p = std::make_shared<double>(2.0);
    auto omit = std::make_shared<std::string>("2.3,2.3;2.7,2.7");
    auto sigma = std::make_shared<double>(0.2);
    auto delta = std::make_shared<double>(0.25);
    auto screen_tol = std::make_shared<double>(0.15);
    auto count = std::make_shared<int>(1024);
    auto res = std::make_shared<int>(128);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto report = std::make_shared<std::string>();
    auto expect = std::make_shared<std::string>();
    chart_args->box_half = 2.9;
    ladder_args->eps_max = 1.0;
    ladder_args->rungs = 3;
    ladder_args->ratio = 0.1;
    add_chart_flags(cmd, *chart_args);
    add_ladder_flags(cmd, *ladder_args);
    cmd->add_option("--alpha", *alphas,
                    "stretch exponents of the family, repeatable")
        ->required();
    cmd->add_option("--budget", *budget, "weight budget Q expression (or @file)");
    cmd->add_option("--p", *p, "screening exponent");
    cmd->add_option("--omit", *omit,
                    "declared omitted continuum, polyline x1,..;x1,..");
    cmd->add_option("--sigma", *sigma, "ceiling for sup omega at the last rung");
    cmd->add_option("--delta", *delta, "required omitted-continuum diameter");
    cmd->add_option("--screen-tol", *screen_tol, "slack on the budget screen");
    cmd->add_option("--curves", *count, "curves per screening solve");
    cmd->add_option("--res", *res, "screening grid resolution");
    cmd->add_option("--seed", *seed, "sampling seed");
    cmd->add_option("--report", *report, "CSV report (mapping,eps,omega,included)");
    cmd->add_option("--expect", *expect, "expected verdict: Pass | Fail");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      auto omitted = parse_polyline(*omit, chart.dim());
      std::vector<MappingSpec> family;
      for (double a : *alphas) {
        auto f = MappingSpec::radial_stretch(chart, a, x0);
        f.declare_omitted_continuum(omitted);
        family.push_back(std::move(f));
      }
      EquiOptions opts;
      opts.sigma = *sigma;
      opts.delta = *delta;
      opts.screen_tol = *screen_tol;
      opts.count = *count;
      opts.resolution = *res;
      opts.seed = *seed;
      opts.report_csv = *report;
      auto ladder = make_eps_ladder(ladder_args->eps_max, ladder_args->rungs,
                                    ladder_args->ratio);
      auto rep = run_equicontinuity_experiment(family, make_q(*budget), x0, *p,
                                               ladder, opts);
      for (const auto& row : rep.mappings) {
        std::cout << row.label << ": est Q " << row.est_q << ", "
                  << (row.included ? "included" : "excluded");
        if (!row.notice.empty()) std::cout << " (" << row.notice << ")";
        if (row.included)
          std::cout << ", omega/eps growth " << row.gehring_growth;
        std::cout << "\n";
      }
      std::cout << "sup omega:";
      for (std::size_t i = 0; i < rep.eps.size(); ++i)
        std::cout << " " << rep.sup_omega[i] << "@" << rep.eps[i];
      std::cout << "\nverdict: " << (rep.pass ? "Pass" : "Fail") << "\n";
      exit_code = expected_exit(rep.pass ? "Pass" : "Fail", *expect, rep.pass,
                                false);
    });
  }

  // ------------------------------------------------------------------ loewner
  {
    auto* cmd = app.add_subcommand(
        "loewner",
        "positive lower bound for moduli of curves joining continuum pairs");
    auto chart_args = std::make_shared<ChartArgs>();
    auto solve_args = std::make_shared<SolveArgs>();
    auto pair_texts = std::make_shared<std::vector<std::string>>();
    auto p = std::make_shared<double>(2.0);
    auto R = std::make_shared<double>(2.0);
    auto res = std::make_shared<int>(128);
    auto count = std::make_shared<int>(512);
    auto seed = std::make_shared<std::uint64_t>(3);
    auto report = std::make_shared<std::string>();
    auto expect = std::make_shared<std::string>();
    chart_args->box_half = 2.2;
    add_chart_flags(cmd, *chart_args);
    add_solver_flags(cmd, *solve_args);
    cmd->add_option("--pair", *pair_texts,
                    "continuum pair E|F, each a polyline x1,..;x1,.. "
                    "(default: five segment pairs in the unit-2 ball)");
    cmd->add_option("--p", *p, "modulus exponent");
    cmd->add_option("--R", *R, "ball radius containing the continua");
    cmd->add_option("--res", *res, "grid resolution");
    cmd->add_option("--curves", *count, "curves per pair");
    cmd->add_option("--seed", *seed, "sampling seed");
    cmd->add_option("--report", *report, "CSV report (pair,modulus,diam_E,diam_F,rho)");
    cmd->add_option("--expect", *expect, "expected verdict: Pass | Fail");

    cmd->callback([=, &exit_code]() {
      auto chart = make_chart(*chart_args);
      GridDomain grid(chart, *res);
      Vec x0 = parse_point(chart_args->x0, chart.dim());
      std::vector<ContinuumPair> pairs;
      if (pair_texts->empty()) {
        auto seg = [&](double ax, double ay, double bx, double by) {
          return std::vector<Vec>{make_vec({ax, ay}), make_vec({bx, by})};
        };
        pairs = {{seg(-1.0, 0.0, -0.2, 0.0), seg(0.2, 0.0, 1.0, 0.0)},
                 {seg(-1.0, -1.0, -1.0, 1.0), seg(1.0, -1.0, 1.0, 1.0)},
                 {seg(-0.5, -0.5, 0.5, -0.5), seg(-0.5, 0.5, 0.5, 0.5)},
                 {seg(-1.2, 0.0, 0.0, -1.2), seg(0.0, 1.2, 1.2, 0.0)},
                 {seg(-0.4, 0.1, -0.1, 0.1), seg(0.1, 0.1, 0.4, 0.1)}};
      } else {
        for (const auto& text : *pair_texts) {
          auto bar = text.find('|');
          if (bar == std::string::npos)
            throw config_error("--pair needs the form E|F");
          pairs.push_back({parse_polyline(text.substr(0, bar), chart.dim()),
                           parse_polyline(text.substr(bar + 1), chart.dim())});
        }
      }
      auto rep = check_loewner_bound(pairs, *p, grid, *count, *seed, x0, *R,
                                     make_solve(*solve_args));
      if (!report->empty()) rep.write_csv(*report);
      std::cout << "1/C = " << rep.inv_c << " over " << rep.rows.size()
                << " pairs, rescale ratio " << rep.rescale_ratio << "\n";
      const bool pass = rep.positive && rep.rescale_stable;
      std::cout << "verdict: " << (pass ? "Pass" : "Fail") << "\n";
      exit_code = expected_exit(pass ? "Pass" : "Fail", *expect, pass, false);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "modp: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
