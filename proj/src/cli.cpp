#include "bergman/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "bergman/asymfit.hpp"
#include "bergman/report.hpp"

namespace bergman {

namespace {

std::string load_input(const std::string& input) {
  std::error_code ec;
  if (!input.empty() && std::filesystem::is_regular_file(input, ec)) {
    std::ifstream in(input);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  }
  return input;
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["R"] = cfg.quad.cutoff_R;
  j["rel_tol"] = cfg.quad.rel_tol;
  j["max_subdivisions"] = cfg.quad.max_subdivisions;
  j["tau_grid"] = Json::array(
      {cfg.quad.tau_grid.lo, cfg.quad.tau_grid.hi, cfg.quad.tau_grid.per_decade});
  j["rho_grid"] = Json::array(
      {cfg.quad.rho_grid.lo, cfg.quad.rho_grid.hi, cfg.quad.rho_grid.per_decade});
  j["u_box"] = cfg.quad.u_box;
  j["seed"] = cfg.seed;
  return j;
}

void emit(const RunConfig& cfg, Json report, const std::vector<CurveSample>* curve) {
  std::string text = report.dump(2);
  std::cout << text << "\n";
  if (!cfg.out.empty()) {
    std::ofstream json_file(cfg.out + ".json", std::ios::binary);
    json_file << text << "\n";
    if (curve) {
      std::ofstream csv_file(cfg.out + ".csv", std::ios::binary);
      csv_file << curve_csv(*curve);
    }
  }
}

Json curve_meta(const RunConfig& cfg, const ModelFunction& f, const char* abscissa) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = cfg.command;
  j["input"] = render(f);
  j["abscissa"] = abscissa;
  j["config"] = config_json(cfg);
  return j;
}

std::vector<double> zeta_grid(const RunConfig& cfg, const NewtonData& nd) {
  std::vector<double> out;
  if (cfg.s_points > 0) {
    for (int i = 0; i < cfg.s_points; ++i)
      out.push_back(cfg.s_min + (cfg.s_max - cfg.s_min) * i /
                                    std::max(1, cfg.s_points - 1));
    return out;
  }
  double base = -2.0 / to_double(nd.d);
  std::set<double> grid;
  for (double delta : {0.2, 0.1, 0.05, 0.025, 0.0125}) grid.insert(base + delta);
  for (double s : {0.0, 0.5, 1.0, 2.0}) grid.insert(s);
  return {grid.begin(), grid.end()};
}

int run_verify(const RunConfig& cfg, const ModelFunction& f) {
  NewtonData nd = newton_data(f);
  Json report;
  report["schema"] = kSchemaVersion;
  report["command"] = "verify";
  report["input"] = render(f);
  report["target"] = cfg.target;
  report["newton_data"] = to_json(nd, f);
  report["config"] = config_json(cfg);

  std::optional<double> threshold;
  if (cfg.threshold >= 0) threshold = cfg.threshold;

  if (cfg.target == "zeta_pole") {
    PoleProbeReport probe =
        pole_order_probe(f, nd, cfg.quad, cfg.threshold >= 0 ? cfg.threshold : 0.10);
    report["predicted"] = to_json(predicted_law(nd, LawTarget::zeta_pole));
    report["probe"] = to_json(probe);
    report["passed"] = probe.passed;
    emit(cfg, report, &probe.g);
    return probe.passed ? 0 : 1;
  }

  LawTarget target;
  if (cfg.target == "bergman") {
    target = LawTarget::bergman;
  } else if (cfg.target == "c0") {
    target = LawTarget::c0;
  } else if (cfg.target == "laplace") {
    target = LawTarget::laplace;
  } else if (cfg.target == "fiber") {
    target = LawTarget::fiber;
  } else {
    throw std::invalid_argument("unknown verify target: " + cfg.target);
  }
  AsymptoticLaw law = predicted_law(nd, target);  // refuses noncompact inputs

  std::vector<CurveSample> curve;
  if (target == LawTarget::bergman) {
    BergmanEvaluator eval(f, cfg.quad);
    for (double rho : cfg.quad.rho_grid.points()) curve.push_back(eval(rho));
  } else if (target == LawTarget::c0 || target == LawTarget::laplace) {
    for (double tau : cfg.quad.tau_grid.points())
      curve.push_back(target == LawTarget::c0 ? c0_tilde(f, tau, cfg.quad)
                                              : laplace_L(f, tau, cfg.quad));
  } else {
    for (double u : cfg.quad.rho_grid.points()) curve.push_back(fiber_H(f, u, cfg.quad));
  }
  FitReport fit = compensated_ratio_fit(curve, law, threshold);
  report["predicted"] = to_json(law);
  report["fitted"] = to_json(fit);
  Json scan = Json();
  try {
    ScanResult sc = exponent_scan(curve, law.variable);
    scan = Json{{"a_est", sc.a_est},
                {"a_unc", sc.a_unc},
                {"a_snapped", to_string(sc.a_snapped)},
                {"k_est", sc.k_est}};
  } catch (const std::invalid_argument&) {
    scan = Json();  // fewer than three decades: blind scan unavailable
  }
  report["scan"] = scan;
  report["passed"] = fit.passed;
  emit(cfg, report, &curve);
  return fit.passed ? 0 : 1;
}

int run_command(const RunConfig& cfg) {
  if (cfg.list_fixtures) {
    std::cout << fixtures_json().dump(2) << "\n";
    return 0;
  }
  ModelFunction f = parse_model(load_input(cfg.input));

  if (cfg.command == "newton") {
    Json j = to_json(newton_data(f), f);
    emit(cfg, j, nullptr);
    return 0;
  }
  if (cfg.command == "bergman") {
    BergmanEvaluator eval(f, cfg.quad);
    std::vector<CurveSample> curve;
    for (double rho : cfg.quad.rho_grid.points()) curve.push_back(eval(rho));
    Json j = curve_meta(cfg, f, "rho");
    j["tail_fit"] = Json{{"c", eval.tail().c},
                         {"a", eval.tail().a},
                         {"k", eval.tail().k},
                         {"drift", eval.tail().drift}};
    emit(cfg, j, &curve);
    return 0;
  }
  if (cfg.command == "zeta") {
    NewtonData nd = newton_data(f);
    std::vector<CurveSample> curve;
    for (double s : zeta_grid(cfg, nd)) curve.push_back(zeta_Z(f, s, cfg.quad));
    Json j = curve_meta(cfg, f, "s");
    j["d"] = to_string(nd.d);
    j["pole_location"] = -2.0 / to_double(nd.d);
    emit(cfg, j, &curve);
    return 0;
  }
  if (cfg.command == "fiber") {
    std::vector<CurveSample> curve;
    for (double u : cfg.quad.rho_grid.points()) curve.push_back(fiber_H(f, u, cfg.quad));
    Json j = curve_meta(cfg, f, "u");
    emit(cfg, j, &curve);
    return 0;
  }
  if (cfg.command == "localize") {
    std::vector<CurveSample> curve;
    for (double tau : cfg.quad.tau_grid.points()) {
      double e = localization_gap(f, tau, cfg.quad.u_box, cfg.quad);
      curve.push_back({tau, e, 0.0});
    }
    double eps = infimum_outside_plateau(f, cfg.quad.cutoff_R, cfg.quad.u_box);
    // Decay-rate estimate over the upper half of the grid.
    double rate = 0;
    {
      size_t half = curve.size() / 2;
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      double n = 0;
      for (size_t i = half; i < curve.size(); ++i) {
        if (curve[i].value <= 0) continue;
        double x = curve[i].abscissa, y = std::log(curve[i].value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1;
      }
      if (n >= 2) rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx) / 2.0;
    }
    Json j = curve_meta(cfg, f, "tau");
    j["epsilon_grid_infimum"] = eps;
    j["decay_rate_estimate"] = rate;
    emit(cfg, j, &curve);
    return 0;
  }
  if (cfg.command == "verify") return run_verify(cfg, f);
  if (cfg.command == "sandwich") {
    SandwichReport s = sandwich_check(f, cfg.M, cfg.quad);
    Json j = curve_meta(cfg, f, "rho");
    j["sandwich"] = to_json(s);
    emit(cfg, j, &s.middle);
    return s.passed ? 0 : 1;
  }
  throw std::invalid_argument("unknown command: " + cfg.command);
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    return run_command(cfg);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NoncompactPrincipalFace& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what()
              << " (best estimate " << fmt_double(e.best_estimate) << ", error "
              << fmt_double(e.est_error) << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Newton polyhedra of model functions and the boundary asymptotics "
               "of their weighted transforms"};
  RunConfig cfg;
  app.set_config("--config");
  app.add_option("--command", cfg.command,
                 "newton|bergman|zeta|fiber|verify|localize|sandwich");
  app.add_option("--input,-i", cfg.input, "model text or a file containing it");
  app.add_option("--target", cfg.target, "verify target: bergman|c0|laplace|fiber|zeta_pole");
  app.add_option("--R", cfg.quad.cutoff_R, "cutoff radius (plateau R/2)");
  app.add_option("--rel-tol", cfg.quad.rel_tol, "quadrature relative tolerance");
  app.add_option("--abs-tol", cfg.quad.abs_tol, "quadrature absolute floor");
  app.add_option("--max-depth", cfg.quad.max_subdivisions, "adaptive bisection depth");
  app.add_option("--tau-min", cfg.quad.tau_grid.lo, "tau grid start (>= 1)");
  app.add_option("--tau-max", cfg.quad.tau_grid.hi, "tau grid end");
  app.add_option("--tau-per-decade", cfg.quad.tau_grid.per_decade, "tau samples per decade");
  app.add_option("--rho-min", cfg.quad.rho_grid.lo, "rho (or u) grid start");
  app.add_option("--rho-max", cfg.quad.rho_grid.hi, "rho (or u) grid end");
  app.add_option("--rho-per-decade", cfg.quad.rho_grid.per_decade, "rho samples per decade");
  app.add_option("--s-min", cfg.s_min, "zeta grid start");
  app.add_option("--s-max", cfg.s_max, "zeta grid end");
  app.add_option("--s-points", cfg.s_points, "zeta grid size (0 = pole ladder)");
  app.add_option("--U-box", cfg.quad.u_box, "outer box for the localization gap");
  app.add_option("--threshold", cfg.threshold, "fit drift threshold (default per law)");
  app.add_option("--out", cfg.out, "output path prefix for .json/.csv");
  app.add_option("--seed", cfg.seed, "seed for sampled searches");
  app.add_option("--M", cfg.M, "sandwich axis power (even; 0 = search)");
  app.add_option("--threads", cfg.quad.threads, "worker threads (0 = hardware)");
  app.add_flag("--list-fixtures", cfg.list_fixtures, "print the fixture corpus as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!cfg.list_fixtures) {
    if (cfg.command.empty()) {
      std::cerr << "input error: --command is required\n";
      return 2;
    }
    if (cfg.input.empty()) {
      std::cerr << "input error: --input is required\n";
      return 2;
    }
  }
  return run(cfg);
}

}  // namespace bergman
