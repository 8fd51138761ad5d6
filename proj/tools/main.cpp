// wdro_cli: config-driven robust portfolio experiments over the wdro C API.
//
// Subcommands: solve (single radius), sweep (radius schedule with convergence
// report), diagnose (market and utility diagnostics). Exit codes: 0 success,
// 1 configuration/IO error, 2 ill-posed problem (with a divergence witness).

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "jsonw.hpp"
#include "wdro/wdro.h"

namespace {

using wdrocli::Config;
using wdrocli::JsonWriter;

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::optional<std::uint64_t> seed_override;
};

struct Handles {
  wdro_utility* utility = nullptr;
  wdro_measure* measure = nullptr;
  wdro_constraint* constraint = nullptr;

  ~Handles() {
    wdro_utility_free(utility);
    wdro_measure_free(measure);
    wdro_constraint_free(constraint);
  }
};

[[noreturn]] void die(const std::string& msg, int code = 1) {
  std::fprintf(stderr, "wdro: %s\n", msg.c_str());
  std::exit(code);
}

void check(wdro_status st, const std::string& what) {
  if (st == WDRO_OK) return;
  die(what + ": " + wdro_last_error(), st == WDRO_ERR_ILL_POSED ? 2 : 1);
}

std::vector<wdro_piece> parse_pieces(const std::string& spec) {
  // form:a,b,c,e@upper ; ... with forms affine|log|pow|exp, upper 'inf' allowed.
  std::vector<wdro_piece> out;
  std::istringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) die("utility.pieces: missing ':' in piece '" + tok + "'");
    std::string form = tok.substr(0, colon);
    form.erase(0, form.find_first_not_of(" \t"));
    form.erase(form.find_last_not_of(" \t") + 1);
    std::string rest = tok.substr(colon + 1);
    const auto at = rest.find('@');
    std::string upper = "inf";
    if (at != std::string::npos) {
      upper = rest.substr(at + 1);
      rest = rest.substr(0, at);
    }
    wdro_piece piece{};
    if (form == "affine")
      piece.form = 0;
    else if (form == "log")
      piece.form = 1;
    else if (form == "pow")
      piece.form = 2;
    else if (form == "exp")
      piece.form = 3;
    else
      die("utility.pieces: unknown form '" + form + "'");
    double params[4] = {0.0, 0.0, 0.0, 1.0};
    std::istringstream ps(rest);
    std::string num;
    int i = 0;
    while (std::getline(ps, num, ',') && i < 4) params[i++] = std::strtod(num.c_str(), nullptr);
    piece.a = params[0];
    piece.b = params[1];
    piece.c = params[2];
    piece.e = params[3];
    upper.erase(0, upper.find_first_not_of(" \t"));
    piece.upper = (upper.rfind("inf", 0) == 0) ? 1e308 : std::strtod(upper.c_str(), nullptr);
    out.push_back(piece);
  }
  if (out.empty()) die("utility.pieces: no pieces given");
  return out;
}

wdro_utility* build_utility(const Config& cfg) {
  const std::string kind = cfg.require_str("utility.kind");
  const double q = cfg.num("utility.q", 0.0);
  const double p_growth = cfg.num("utility.p_growth", 0.0);
  const double c1 = cfg.num("utility.c1", 0.0);
  const double x_lower = cfg.num("utility.x_lower", 0.0);
  wdro_utility* u = nullptr;
  if (kind == "custom_piecewise") {
    const auto pieces = parse_pieces(cfg.require_str("utility.pieces"));
    check(wdro_utility_create_piecewise(pieces.data(), static_cast<int>(pieces.size()),
                                        p_growth > 0 ? p_growth : 1.0, c1 > 0 ? c1 : 1.0,
                                        x_lower > 0 ? x_lower : 1.0, &u),
          "utility");
  } else {
    check(wdro_utility_create(kind.c_str(), q, p_growth, c1, x_lower, &u), "utility");
  }
  return u;
}

wdro_measure* build_measure(const Config& cfg, const CliArgs& args) {
  if (cfg.has("data.csv")) {
    const wdrocli::CsvData csv = wdrocli::load_returns_csv(cfg.require_str("data.csv"));
    wdro_measure* m = nullptr;
    check(wdro_measure_create(csv.dim, static_cast<int>(csv.atoms.size()) / csv.dim,
                              csv.atoms.data(), nullptr, &m),
          "data.csv");
    return m;
  }
  const std::string gen = cfg.str("data.generator");
  if (gen != "gaussian") die("data: need data.csv or data.generator = gaussian");
  if (!cfg.has("data.seed") && !args.seed_override)
    die("data: synthetic generator requires data.seed (or --seed)");
  const int d = static_cast<int>(cfg.require_num("data.d"));
  const int n = static_cast<int>(cfg.require_num("data.n"));
  const std::uint64_t seed = args.seed_override ? *args.seed_override : cfg.u64("data.seed", 0);
  std::vector<double> mean = cfg.num_list("data.mean");
  std::vector<double> sigma = cfg.num_list("data.sigma");
  if (mean.empty()) mean.assign(d, 0.0);
  if (sigma.empty()) sigma.assign(d, 0.2);
  if (mean.size() == 1) mean.assign(d, mean[0]);
  if (sigma.size() == 1) sigma.assign(d, sigma[0]);
  if (static_cast<int>(mean.size()) != d || static_cast<int>(sigma.size()) != d)
    die("data: mean/sigma length must match data.d");
  wdro_measure* m = nullptr;
  check(wdro_measure_synthetic_gaussian(d, n, seed, mean.data(), sigma.data(), &m), "data");
  return m;
}

wdro_constraint* build_constraint(const Config& cfg, int dim) {
  const std::string kind = cfg.require_str("constraints.kind");
  wdro_constraint* c = nullptr;
  if (kind == "halfspace" || kind == "halfspace_nonneg" || kind == "two_sided") {
    check(wdro_constraint_create(kind.c_str(), dim, cfg.require_num("constraints.a"), &c),
          "constraints");
  } else if (kind == "polyhedron") {
    const auto normals = cfg.num_rows("constraints.normals");
    const auto offsets = cfg.num_list("constraints.offsets");
    if (normals.empty() || normals.size() != offsets.size())
      die("constraints: polyhedron needs matching normals/offsets");
    std::vector<double> flat;
    for (const auto& row : normals) {
      if (static_cast<int>(row.size()) != dim) die("constraints: normal dimension mismatch");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    check(wdro_constraint_polyhedron(dim, static_cast<int>(normals.size()), flat.data(),
                                     offsets.data(), &c),
          "constraints");
  } else if (kind == "singleton") {
    const auto w0 = cfg.num_list("constraints.w0");
    if (static_cast<int>(w0.size()) != dim) die("constraints: w0 dimension mismatch");
    check(wdro_constraint_singleton(dim, w0.data(), &c), "constraints");
  } else if (kind == "finite_list") {
    const auto rows = cfg.num_rows("constraints.candidates");
    if (rows.empty()) die("constraints: finite_list needs candidates");
    std::vector<double> flat;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != dim) die("constraints: candidate dimension mismatch");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    check(wdro_constraint_finite_list(dim, static_cast<int>(rows.size()), flat.data(), &c),
          "constraints");
  } else {
    die("constraints: unknown kind '" + kind + "'");
  }
  return c;
}

wdro_solve_options build_options(const Config& cfg, const CliArgs& args) {
  wdro_solve_options opts;
  wdro_solve_options_init(&opts);
  opts.eta0 = cfg.num("solver.eta0", 0.0);
  opts.max_iterations = static_cast<int>(cfg.num("solver.max_iterations", 5000));
  opts.grad_tol = cfg.num("solver.grad_tol", 1e-6);
  opts.gap_tol = cfg.num("solver.gap_tol", 1e-8);
  if (opts.max_iterations <= 0 || opts.grad_tol <= 0 || opts.gap_tol <= 0)
    die("solver: tolerances and iteration caps must be positive");
  const int cores = static_cast<int>(std::thread::hardware_concurrency());
  opts.threads = args.threads > 0
                     ? args.threads
                     : static_cast<int>(cfg.num("solver.threads", std::max(1, cores)));
  return opts;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die("cannot write '" + path + "'");
  out << content;
}

std::string measure_json(const wdro_measure* m) {
  size_t needed = 0;
  check(wdro_measure_to_json(m, nullptr, 0, &needed), "measure json");
  std::string buf(needed, '\0');
  check(wdro_measure_to_json(m, buf.data(), buf.size(), &needed), "measure json");
  buf.resize(needed - 1);
  return buf;
}

// Reference direction for the ill-posedness witness: the projection of the
// origin onto D when nonzero, otherwise the uniform direction.
std::vector<double> witness_direction(const wdro_constraint* D, int dim) {
  std::vector<double> zero(dim, 0.0), w(dim, 0.0);
  check(wdro_constraint_project(D, zero.data(), w.data()), "witness direction");
  double nn = 0.0;
  for (double v : w) nn += v * v;
  if (nn < 1e-20) w.assign(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  return w;
}

int run_witness_exit(const Handles& h, const CliArgs& args, const std::string& hash, double p,
                     double k, double x0, const std::string& reason) {
  const int dim = wdro_measure_dim(h.measure);
  const std::vector<double> w = witness_direction(h.constraint, dim);
  wdro_measure* witness = nullptr;
  double k_used = 0.0, expectation = 0.0;
  int reached = 0;
  const wdro_status st = wdro_divergence_witness(h.utility, h.measure, p, k, x0, w.data(), dim,
                                                 -1e3, &witness, &k_used, &expectation, &reached);
  JsonWriter j;
  j.begin_object();
  j.field("version", std::string(wdro_version()));
  j.field("config_hash", hash);
  j.field("error", std::string("ill-posed: ") + reason);
  if (st == WDRO_OK) {
    j.field("witness_k", k_used);
    j.field("witness_expectation", expectation);
    j.field("target_reached", reached != 0);
    j.field("witness_direction", w);
    j.field_raw("witness_measure", measure_json(witness));
    wdro_measure_free(witness);
  } else {
    j.field("witness_error", std::string(wdro_last_error()));
  }
  j.end_object();
  write_file(args.out_dir + "/witness.json", j.str() + "\n");
  std::fprintf(stderr, "wdro: ill-posed problem: %s (witness written to %s/witness.json)\n",
               reason.c_str(), args.out_dir.c_str());
  return 2;
}

struct ProblemParams {
  double p = 2.0;
  double x0 = 1.0;
};

ProblemParams problem_params(const Config& cfg) {
  ProblemParams pp;
  pp.p = cfg.num("ambiguity.p", 2.0);
  pp.x0 = cfg.num("problem.x0", 1.0);
  if (pp.p < 1.0) die("ambiguity.p must be >= 1");
  if (pp.x0 == 0.0) die("problem.x0 must be nonzero");
  return pp;
}

int cmd_solve(const Config& cfg, const CliArgs& args) {
  const ProblemParams pp = problem_params(cfg);
  const double k = cfg.require_num("ambiguity.k");
  const std::string hash = wdrocli::config_hash(cfg.raw_text(), args.seed_override);

  Handles h;
  h.utility = build_utility(cfg);
  h.measure = build_measure(cfg, args);
  const int dim = wdro_measure_dim(h.measure);
  h.constraint = build_constraint(cfg, dim);

  wdro_admissibility adm{};
  check(wdro_utility_admissibility(h.utility, 0, 0, &adm), "admissibility");
  if (!adm.pass)
    return run_witness_exit(h, args, hash, pp.p, k, pp.x0,
                            std::string("utility failed admissibility (") + adm.violation + ")");

  const wdro_solve_options opts = build_options(cfg, args);
  wdro_outer_solution* sol = nullptr;
  const wdro_status st =
      wdro_maximize(h.utility, h.measure, pp.p, k, pp.x0, h.constraint, &opts, &sol);
  if (st == WDRO_ERR_ILL_POSED)
    return run_witness_exit(h, args, hash, pp.p, k, pp.x0, wdro_last_error());
  check(st, "solve");

  std::vector<double> w(dim, 0.0);
  check(wdro_outer_weights(sol, w.data(), dim), "solve weights");
  double norm = 0.0;
  for (double v : w) norm += v * v;
  norm = std::sqrt(norm);

  double cp = 0.0;
  check(wdro_measure_moment(h.measure, pp.p, &cp), "moment");
  int na = 0;
  check(wdro_measure_na_check(h.measure, &na, nullptr), "na");
  double beta = 0.0;
  int beta_degenerate = 1;
  {
    wdro_measure* pstar = nullptr;
    if (wdro_measure_pstar(h.measure, pp.p, k, &pstar) == WDRO_OK) {
      (void)wdro_measure_beta_star(pstar, 1024, &beta, &beta_degenerate);
      wdro_measure_free(pstar);
    }
  }

  JsonWriter j;
  j.begin_object();
  j.field("version", std::string(wdro_version()));
  j.field("config_hash", hash);
  j.field("k", k);
  j.field("p", pp.p);
  j.field("x0", pp.x0);
  j.field("w", w);
  j.field("norm", norm);
  j.field("value", wdro_outer_value(sol));
  j.field("iterations", wdro_outer_iterations(sol));
  j.field("piece", wdro_outer_piece(sol));
  j.begin_object("diagnostics");
  j.field("saturated", wdro_outer_saturated(sol) != 0);
  j.field("dual_lambda", wdro_outer_lambda(sol));
  j.field("duality_gap", wdro_outer_gap(sol));
  j.field("budget_norm", wdro_outer_budget_norm(sol));
  j.field("k_bound", wdro_outer_k_bound(sol));
  j.field("norm_over_k_bound", norm / wdro_outer_k_bound(sol));
  j.field("cp", cp);
  j.field("no_arbitrage", na != 0);
  if (beta_degenerate)
    j.field_null("beta_star");
  else
    j.field("beta_star", beta);
  j.end_object();
  j.end_object();
  write_file(args.out_dir + "/solution.json", j.str() + "\n");
  std::printf("solve: value %.12g at |w| = %.12g (out: %s/solution.json)\n",
              wdro_outer_value(sol), norm, args.out_dir.c_str());
  wdro_outer_free(sol);
  return 0;
}

std::vector<double> schedule_from(const Config& cfg) {
  std::vector<double> ks = cfg.num_list("ambiguity.k_schedule");
  if (ks.empty() && cfg.has("ambiguity.k_start")) {
    const double start = cfg.require_num("ambiguity.k_start");
    const double factor = cfg.num("ambiguity.k_factor", 2.0);
    const int count = static_cast<int>(cfg.num("ambiguity.k_count", 7));
    double k = start;
    for (int i = 0; i < count; ++i) {
      ks.push_back(k);
      k *= factor;
    }
  }
  if (ks.empty()) die("sweep: empty schedule (set ambiguity.k_schedule)");
  return ks;
}

int cmd_sweep(const Config& cfg, const CliArgs& args) {
  const ProblemParams pp = problem_params(cfg);
  const std::vector<double> ks = schedule_from(cfg);
  const std::string hash = wdrocli::config_hash(cfg.raw_text(), args.seed_override);

  Handles h;
  h.utility = build_utility(cfg);
  h.measure = build_measure(cfg, args);
  const int dim = wdro_measure_dim(h.measure);
  h.constraint = build_constraint(cfg, dim);

  wdro_admissibility adm{};
  check(wdro_utility_admissibility(h.utility, 0, 0, &adm), "admissibility");
  if (!adm.pass)
    return run_witness_exit(h, args, hash, pp.p, ks.front(), pp.x0,
                            std::string("utility failed admissibility (") + adm.violation + ")");

  const wdro_solve_options opts = build_options(cfg, args);
  const bool warm = cfg.flag("solver.warm_start", true);

  wdro_sweep* sw = nullptr;
  check(wdro_sweep_run(h.utility, h.measure, pp.p, ks.data(), static_cast<int>(ks.size()), pp.x0,
                       h.constraint, &opts, warm ? 1 : 0, &sw),
        "sweep");

  // CSV: k, w components, norm, value, dist, iters, ms
  std::string csv = "k";
  for (int t = 0; t < dim; ++t) csv += ",w" + std::to_string(t);
  csv += ",norm,value,dist,iters,ms\n";
  std::string plot;
  JsonWriter j;
  j.begin_object();
  j.field("version", std::string(wdro_version()));
  j.field("config_hash", hash);
  j.field("min_norm", wdro_sweep_min_norm(sw));
  j.field("value_monotone", wdro_sweep_value_monotone(sw) != 0);
  j.field("non_monotone_excursions", wdro_sweep_excursions(sw));
  j.begin_array("records");
  double final_dist = 0.0;
  for (int i = 0; i < wdro_sweep_count(sw); ++i) {
    wdro_sweep_record rec{};
    std::vector<double> w(dim, 0.0);
    check(wdro_sweep_record_get(sw, i, &rec, w.data()), "sweep record");
    csv += JsonWriter::number(rec.k);
    for (int t = 0; t < dim; ++t) csv += "," + JsonWriter::number(rec.ok ? w[t] : std::nan(""));
    csv += "," + JsonWriter::number(rec.norm) + "," + JsonWriter::number(rec.value) + "," +
           JsonWriter::number(rec.dist) + "," + std::to_string(rec.iterations) + "," +
           JsonWriter::number(rec.wall_ms) + "\n";
    plot += JsonWriter::number(rec.k) + " " + JsonWriter::number(rec.dist) + "\n";
    j.begin_array_item();
    j.field("k", rec.k);
    j.field("ok", rec.ok != 0);
    if (rec.ok) {
      j.field("w", w);
      j.field("norm", rec.norm);
      j.field("value", rec.value);
      j.field("dist", rec.dist);
      j.field("iterations", rec.iterations);
      j.field("bound_at_min_norm", rec.bound_at_min_norm);
      final_dist = rec.dist;
    }
    j.end_object();
  }
  j.end_array();

  std::vector<double> deltas = cfg.num_list("solver.delta_grid");
  if (deltas.empty()) deltas = {0.5, 0.2, 0.1, 0.05, 0.02};
  j.begin_array("k0_table");
  for (double d : deltas) {
    double k0 = 0.0;
    int found = 0;
    check(wdro_sweep_k0(sw, d, &k0, &found), "k0");
    j.begin_array_item();
    j.field("delta", d);
    if (found)
      j.field("k0", k0);
    else
      j.field_null("k0");
    j.end_object();
  }
  j.end_array();
  j.field("final_dist", final_dist);
  j.end_object();

  write_file(args.out_dir + "/sweep.csv", csv);
  write_file(args.out_dir + "/sweep_summary.json", j.str() + "\n");
  write_file(args.out_dir + "/sweep_plot.dat", plot);
  std::printf("sweep: %d radii, final dist %.6g (out: %s)\n", wdro_sweep_count(sw), final_dist,
              args.out_dir.c_str());
  wdro_sweep_free(sw);
  return 0;
}

int cmd_diagnose(const Config& cfg, const CliArgs& args) {
  const ProblemParams pp = problem_params(cfg);
  const double k = cfg.num("ambiguity.k", 1.0);
  const std::string hash = wdrocli::config_hash(cfg.raw_text(), args.seed_override);

  Handles h;
  h.utility = build_utility(cfg);
  h.measure = build_measure(cfg, args);
  const int dim = wdro_measure_dim(h.measure);
  h.constraint = build_constraint(cfg, dim);

  wdro_admissibility adm{};
  check(wdro_utility_admissibility(h.utility, 0, 0, &adm), "admissibility");
  wdro_ae_report ae{};
  check(wdro_utility_ae(h.utility, &ae), "ae");
  double cp = 0.0;
  check(wdro_measure_moment(h.measure, pp.p, &cp), "moment");
  int na = 0;
  std::vector<double> arb(dim, 0.0);
  check(wdro_measure_na_check(h.measure, &na, arb.data()), "na");

  double beta = 0.0;
  int beta_degenerate = 1;
  std::string pstar_error;
  {
    wdro_measure* pstar = nullptr;
    if (wdro_measure_pstar(h.measure, pp.p, k, &pstar) == WDRO_OK) {
      if (wdro_measure_beta_star(pstar, 1024, &beta, &beta_degenerate) != WDRO_OK)
        pstar_error = wdro_last_error();
      wdro_measure_free(pstar);
    } else {
      pstar_error = wdro_last_error();
    }
  }

  double K = 0.0;
  const wdro_status k_st =
      wdro_weight_bound(h.utility, h.measure, pp.p, k, pp.x0, h.constraint, &K);

  static const char* case_names[] = {"bounded_above", "rae_minus", "rae_plus", "inadmissible"};
  std::printf("utility: admissibility %s", adm.pass ? "pass" : "FAIL");
  if (!adm.pass) std::printf(" (%s at x = %.6g)", adm.violation, adm.first_violation_x);
  std::printf("\n  AE+inf = %.6g, AE-inf = %.6g, case %s\n", ae.ae_plus, ae.ae_minus,
              case_names[ae.case_tag]);
  std::printf("  gamma = (%.6g, %.6g), envelope C = %.6g\n", ae.gamma_lower, ae.gamma_upper,
              ae.envelope_c);
  std::printf("market: C_P = %.6g, NA(P) %s", cp, na ? "holds" : "FAILS");
  if (!na) {
    std::printf(" (arbitrage direction:");
    for (double v : arb) std::printf(" %.4g", v);
    std::printf(")");
  }
  std::printf("\n");
  if (pstar_error.empty()) {
    if (beta_degenerate)
      std::printf("  beta*(P*) degenerate (a direction carries no negative mass)\n");
    else
      std::printf("  beta*(P*) = %.6g on the dyadic grid\n", beta);
  } else {
    std::printf("  beta*(P*) unavailable: %s\n", pstar_error.c_str());
  }
  if (k_st == WDRO_OK)
    std::printf("bound: K = %.6g at k = %.6g\n", K, k);
  else
    std::printf("bound: K not applicable (%s)\n", wdro_last_error());

  JsonWriter j;
  j.begin_object();
  j.field("version", std::string(wdro_version()));
  j.field("config_hash", hash);
  j.begin_object("admissibility");
  j.field("pass", adm.pass != 0);
  j.field("monotone_ok", adm.monotone_ok != 0);
  j.field("concave_ok", adm.concave_ok != 0);
  j.field("negative_at_x_lower", adm.negative_at_x_lower != 0);
  j.field("growth_ok", adm.growth_ok != 0);
  if (!adm.pass) {
    j.field("violation", std::string(adm.violation));
    j.field("first_violation_x", adm.first_violation_x);
  }
  j.end_object();
  j.begin_object("ae");
  j.field("ae_plus", ae.ae_plus);
  j.field("ae_minus", ae.ae_minus);
  j.field("case", std::string(case_names[ae.case_tag]));
  j.field("gamma_lower", ae.gamma_lower);
  j.field("gamma_upper", ae.gamma_upper);
  j.field("envelope_c", ae.envelope_c);
  j.field("x_upper", ae.x_upper);
  j.end_object();
  j.field("cp", cp);
  j.begin_object("na");
  j.field("holds", na != 0);
  if (!na) j.field("arbitrage_direction", arb);
  j.end_object();
  if (pstar_error.empty() && !beta_degenerate)
    j.field("beta_star", beta);
  else
    j.field_null("beta_star");
  if (k_st == WDRO_OK)
    j.field("k_bound", K);
  else
    j.field_null("k_bound");
  j.end_object();
  write_file(args.out_dir + "/diagnose.json", j.str() + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein distributionally robust expected-utility maximization"};
  app.require_subcommand(1);

  CliArgs args;
  std::uint64_t seed_raw = 0;
  bool seed_given = false;
  app.add_option("--config", args.config_path, "experiment config file")->required();
  app.add_option("--out", args.out_dir, "output directory (default: output.dir or '.')");
  app.add_option("--threads", args.threads, "worker pool size for cold sweeps");
  app.add_option("--seed", seed_raw, "override the synthetic data seed")
      ->each([&](const std::string&) { seed_given = true; });

  auto* solve = app.add_subcommand("solve", "solve at a single radius k");
  auto* sweep = app.add_subcommand("sweep", "run the radius schedule and convergence report");
  auto* diagnose = app.add_subcommand("diagnose", "market and utility diagnostics");
  for (CLI::App* sub : {solve, sweep, diagnose}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (seed_given) args.seed_override = seed_raw;

  try {
    const Config cfg = Config::load(args.config_path);
    if (args.out_dir.empty()) args.out_dir = cfg.str("output.dir", ".");
    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);

    if (solve->parsed()) return cmd_solve(cfg, args);
    if (sweep->parsed()) return cmd_sweep(cfg, args);
    if (diagnose->parsed()) return cmd_diagnose(cfg, args);
  } catch (const std::exception& e) {
    die(e.what());
  }
  return 1;
}
