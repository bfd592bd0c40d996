// Batch harness: runs single solves, reproduces the experiment tables as CSV,
// drives the GPR parameter-prediction pipeline, and evaluates the convergence
// bound diagnostics.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gadi/bounds.hpp"
#include "gadi/errors.hpp"
#include "gadi/gpr.hpp"
#include "gadi/kernels.hpp"
#include "gadi/problems.hpp"
#include "gadi/solver.hpp"
#include "json.hpp"

using namespace gadi;
using nlohmann::json;

namespace {

struct ProblemSpec {
  std::string family;  // convdiff3d | sylvester | mm
  index_t n = 16;
  double r = 1.0;
  std::string path;  // mm only
};

ProblemSpec parse_problem(const std::string& s) {
  ProblemSpec ps;
  const auto colon = s.find(':');
  ps.family = s.substr(0, colon);
  if (ps.family != "convdiff3d" && ps.family != "sylvester" && ps.family != "mm")
    throw CLI::ValidationError("problem", "unknown problem family: " + ps.family);
  if (colon != std::string::npos) {
    std::stringstream rest(s.substr(colon + 1));
    std::string kv;
    while (std::getline(rest, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("problem", "expected key=value: " + kv);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "n")
        ps.n = std::stoll(val);
      else if (key == "r")
        ps.r = std::stod(val);
      else if (key == "path" && ps.family == "mm")
        ps.path = val;
      else
        throw CLI::ValidationError("problem", "unknown problem parameter: " + key);
    }
  }
  if (ps.family == "mm" && ps.path.empty())
    throw CLI::ValidationError("problem", "mm problems need path=<matrix market file>");
  return ps;
}

// Imported matrices get the manufactured right-hand side b = A * ones, so the
// exact solution is the ones vector as in the generated families.
std::pair<SparseMatrix, Vector> load_mm_system(const std::string& path) {
  SparseMatrix A = read_matrix_market_file(path);
  if (A.n_rows() != A.n_cols())
    throw ContractViolation("mm: square matrix required, got " + std::to_string(A.n_rows()) + "x" +
                            std::to_string(A.n_cols()));
  Vector ones(A.n_rows(), 1.0);
  Vector b = matvec(A, ones, Precision::Double);
  return {std::move(A), std::move(b)};
}

struct Triple {
  Precision u_r = Precision::Double, u = Precision::Double, u_f = Precision::Double;
};

Triple parse_triple(const std::string& s) {
  std::stringstream ss(s);
  std::string a, b, c;
  if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ','))
    throw CLI::ValidationError("prec", "expected u_r,u,u_f (e.g. half,double,double)");
  return {precision_from_name(a), precision_from_name(b), precision_from_name(c)};
}

int thread_budget(size_t cells) {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("GADI_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min<size_t>(n == 0 ? 1 : n, cells));
}

template <class F>
void parallel_for(size_t count, F&& body) {
  const int workers = thread_budget(count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

struct CellResult {
  SolveStatus status = SolveStatus::MaxIters;
  double rres = 1.0;
  int iters = 0;
};

std::string fmt_rres(const CellResult& c) {
  switch (c.status) {
    case SolveStatus::Diverged:
    case SolveStatus::OverflowDetected:
    case SolveStatus::SingularInPrecision:
      return "-";  // the tables mark non-convergent runs with a dash
    default: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3e", c.rres);
      return buf;
    }
  }
}

struct RunOptions {
  double omega = 1.0;
  double xi = 0.0;  // 0: default by u
  double epsilon = 1e-2;
  std::string inner = "lu";
  int max_outer = 30000;
  int stall_window = 400;
  bool scale_residual = false;
  bool ones_start = false;
};

GadiConfig make_config(const Triple& t, double alpha, const RunOptions& opt) {
  GadiConfig cfg;
  cfg.alpha = alpha;
  cfg.omega = opt.omega;
  cfg.xi = opt.xi;
  cfg.u_r = t.u_r;
  cfg.u = t.u;
  cfg.u_f = t.u_f;
  cfg.inner.method = inner_method_from_name(opt.inner);
  cfg.inner.tol_epsilon = opt.epsilon;
  cfg.max_outer_iters = opt.max_outer;
  cfg.stall_window = opt.stall_window;
  cfg.residual_scaling = opt.scale_residual;
  cfg.ones_start = opt.ones_start;
  return cfg;
}

CellResult run_cell(const ProblemSpec& ps, const Triple& t, double alpha, const RunOptions& opt) {
  const GadiConfig cfg = make_config(t, alpha, opt);
  SolveReport rep;
  if (ps.family == "convdiff3d") {
    auto prob = build_convdiff3d({ps.n});
    auto s = hss_split(prob.A);
    rep = gadi_ir_solve(prob.A, prob.b, s, cfg).report;
  } else if (ps.family == "mm") {
    auto [A, b] = load_mm_system(ps.path);
    auto s = hss_split(A);
    rep = gadi_ir_solve(A, b, s, cfg).report;
  } else {
    auto prob = build_sylvester({ps.n, ps.r});
    rep = gadi_ab_solve(prob, cfg).report;
  }
  return {rep.status, rep.final_rres, rep.outer_iters};
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw CLI::ValidationError("out", "cannot open " + path);
  return file;
}

std::vector<Triple> parse_triple_list(const std::string& s) {
  std::vector<Triple> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!item.empty()) out.push_back(parse_triple(item));
  if (out.empty()) throw CLI::ValidationError("prec-list", "no precision triples given");
  return out;
}

json report_json(const SolveReport& rep, bool with_history) {
  json j;
  j["status"] = name(rep.status);
  j["outer_iters"] = rep.outer_iters;
  j["final_rres"] = rep.final_rres;
  j["inner_iter_totals"] = rep.inner_iter_totals;
  j["inner_stagnations"] = rep.inner_stagnations;
  json ops = json::object();
  for (const auto& [p, c] : rep.rounding.op_count_by_format) ops[name(p)] = c;
  j["rounding"] = {{"overflow_count", rep.rounding.overflow_count},
                   {"underflow_to_zero_count", rep.rounding.underflow_to_zero_count},
                   {"subnormal_count", rep.rounding.subnormal_count},
                   {"op_count_by_format", ops}};
  if (with_history) j["rel_residual_history"] = rep.rel_residual_history;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GADI-IR mixed-precision sparse solver workbench"};
  app.set_config("--config", "", "line-oriented key = value configuration file");
  app.require_subcommand(1);

  std::string problem_str = "convdiff3d:n=16";
  std::string prec_str = "double,double,double";
  std::string out_path;
  RunOptions opt;

  auto add_common = [&](CLI::App* cmd, bool with_prec = true) {
    cmd->add_option("--problem", problem_str, "problem spec, e.g. convdiff3d:n=16 or sylvester:n=64,r=0.1");
    if (with_prec) cmd->add_option("--prec", prec_str, "precision triple u_r,u,u_f");
    cmd->add_option("--omega", opt.omega, "relaxation parameter in [0,2)");
    cmd->add_option("--xi", opt.xi, "outer squared-relative tolerance (0 = default by u)");
    cmd->add_option("--epsilon", opt.epsilon, "inner Krylov tolerance");
    cmd->add_option("--inner", opt.inner, "inner solver: lu | cg | gmres");
    cmd->add_option("--max-outer", opt.max_outer, "outer iteration cap");
    cmd->add_option("--stall-window", opt.stall_window,
                    "iterations without progress before reporting Stalled (0 = off)");
    cmd->add_flag("--scale-residual", opt.scale_residual,
                  "scale residuals into the u_r normal range (removes the half-precision floor)");
    cmd->add_flag("--ones-start", opt.ones_start, "start from the ones vector instead of zero");
    cmd->add_option("--out", out_path, "output path (default stdout)");
  };

  // ---- solve ----
  auto* solve_cmd = app.add_subcommand("solve", "run one GADI-IR solve, emit a JSON report");
  double alpha = 0.0;
  bool with_history = false;
  add_common(solve_cmd);
  solve_cmd->add_option("--alpha", alpha, "regularization parameter (required)");
  solve_cmd->add_flag("--history", with_history, "include the full residual history");

  // ---- table ----
  auto* table_cmd = app.add_subcommand("table", "cross product of precision triples x alphas, CSV");
  std::string preset;
  std::string prec_list_str = "double,double,double;single,single,single;half,double,double";
  std::string alpha_list_str = "0.01,0.02,10";
  add_common(table_cmd, false);
  table_cmd->add_option("--preset", preset, "table3 | table5 | table6");
  table_cmd->add_option("--prec-list", prec_list_str, "semicolon-separated precision triples");
  table_cmd->add_option("--alpha-list", alpha_list_str, "comma-separated alphas");

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "alpha sweep for one precision triple, CSV");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--alpha-list", alpha_list_str, "comma-separated alphas");

  // ---- gpr ----
  auto* gpr_cmd = app.add_subcommand("gpr", "train-and-predict pipeline for the alpha parameter");
  std::string train_sizes_str = "6,8,10,12";
  std::string target_sizes_str = "32,64,128";
  std::string gpr_fmt = "both";
  std::string train_out, model_out;
  double grid_lo = 1e-2, grid_hi = 1e1, train_xi = 1e-8;
  int grid_points = 19, train_cap = 1500;
  gpr_cmd->add_option("--train-sizes", train_sizes_str, "per-direction sizes of the training instances");
  gpr_cmd->add_option("--targets", target_sizes_str, "per-direction sizes to predict at");
  gpr_cmd->add_option("--fmt", gpr_fmt, "training-set generation precision: single | double | both");
  gpr_cmd->add_option("--grid-lo", grid_lo, "alpha grid lower end");
  gpr_cmd->add_option("--grid-hi", grid_hi, "alpha grid upper end");
  gpr_cmd->add_option("--grid-points", grid_points, "alpha grid size");
  gpr_cmd->add_option("--train-xi", train_xi, "outer tolerance of the training solves");
  gpr_cmd->add_option("--train-cap", train_cap, "outer iteration cap per training solve");
  gpr_cmd->add_option("--train-out", train_out, "write the training set CSV here");
  gpr_cmd->add_option("--model-out", model_out, "write fitted model JSON here");
  gpr_cmd->add_option("--out", out_path, "output path (default stdout)");

  // ---- bounds ----
  auto* bounds_cmd = app.add_subcommand("bounds", "convergence-factor diagnostics next to a measured solve");
  double b_lambda = -1.0, b_gamma = 1.1, b_phi2 = -1.0;
  add_common(bounds_cmd);
  bounds_cmd->add_option("--alpha", alpha, "regularization parameter (required)");
  bounds_cmd->add_option("--lambda", b_lambda, "override the contraction bound lambda");
  bounds_cmd->add_option("--gamma", b_gamma, "iterate-norm ratio gamma");
  bounds_cmd->add_option("--phi2", b_phi2, "override phi_2(n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // every usage problem exits 1
  }

  try {
    std::ofstream file;
    const ProblemSpec ps = parse_problem(problem_str);

    if (solve_cmd->parsed()) {
      if (!(alpha > 0.0)) {
        std::cerr << "solve: --alpha is required and must be positive\n";
        return 1;
      }
      const Triple t = parse_triple(prec_str);
      const GadiConfig cfg = make_config(t, alpha, opt);
      const auto t0 = std::chrono::steady_clock::now();
      SolveReport rep;
      if (ps.family == "convdiff3d") {
        auto prob = build_convdiff3d({ps.n});
        auto s = hss_split(prob.A);
        rep = gadi_ir_solve(prob.A, prob.b, s, cfg).report;
      } else if (ps.family == "mm") {
        auto [A, b] = load_mm_system(ps.path);
        auto s = hss_split(A);
        rep = gadi_ir_solve(A, b, s, cfg).report;
      } else {
        auto prob = build_sylvester({ps.n, ps.r});
        rep = gadi_ab_solve(prob, cfg).report;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      json j = report_json(rep, with_history);
      j["problem"] = problem_str;
      j["alpha"] = alpha;
      j["u_r"] = name(t.u_r);
      j["u"] = name(t.u);
      j["u_f"] = name(t.u_f);
      j["omega"] = opt.omega;
      j["wall_seconds"] = secs;
      open_out(file, out_path) << j.dump(2) << "\n";
      return rep.status == SolveStatus::Converged ? 0 : 2;
    }

    if (table_cmd->parsed() || sweep_cmd->parsed()) {
      std::vector<Triple> triples;
      std::vector<double> alphas;
      if (table_cmd->parsed()) {
        if (preset == "table3") {
          problem_str = "convdiff3d:n=16";
          prec_list_str =
              "double,double,double;single,single,single;single,double,double;"
              "half,double,single;half,double,double;half,single,single";
          alpha_list_str = "0.01,0.02,10";
        } else if (preset == "table5") {
          problem_str = "convdiff3d:n=16";
          prec_list_str = "half,double,double";
          alpha_list_str = "0.01,0.02,0.05,0.1,0.5,1,5,10,100";
        } else if (preset == "table6") {
          prec_list_str = "half,double,double";
          alpha_list_str = "0.01,0.02,10";
        } else if (!preset.empty()) {
          std::cerr << "unknown preset: " << preset << "\n";
          return 1;
        }
        triples = parse_triple_list(prec_list_str);
      } else {
        triples = {parse_triple(prec_str)};
      }
      std::stringstream as(alpha_list_str);
      std::string tok;
      while (std::getline(as, tok, ',')) alphas.push_back(std::stod(tok));
      if (alphas.empty()) {
        std::cerr << "no alphas given\n";
        return 1;
      }

      std::vector<ProblemSpec> specs;
      if (table_cmd->parsed() && preset == "table6") {
        for (double r : {0.01, 0.1, 1.0}) {
          ProblemSpec sp = parse_problem("sylvester:n=64");
          sp.r = r;
          specs.push_back(sp);
        }
      } else {
        specs.push_back(parse_problem(problem_str));
      }

      struct Cell {
        ProblemSpec ps;
        Triple t;
        double alpha;
      };
      std::vector<Cell> cells;
      for (const auto& sp : specs)
        for (const auto& t : triples)
          for (double a : alphas) cells.push_back({sp, t, a});
      std::vector<CellResult> results(cells.size());
      parallel_for(cells.size(), [&](size_t i) {
        results[i] = run_cell(cells[i].ps, cells[i].t, cells[i].alpha, opt);
      });

      auto& os = open_out(file, out_path);
      const bool sylv = !specs.empty() && specs[0].family == "sylvester";
      os << (sylv ? "r,u_r,u,u_f,alpha,status,rres,iters\n" : "u_r,u,u_f,alpha,status,rres,iters\n");
      char buf[160];
      for (size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        if (sylv)
          std::snprintf(buf, sizeof(buf), "%g,%s,%s,%s,%g,%s,%s,%d\n", c.ps.r, name(c.t.u_r),
                        name(c.t.u), name(c.t.u_f), c.alpha, name(results[i].status),
                        fmt_rres(results[i]).c_str(), results[i].iters);
        else
          std::snprintf(buf, sizeof(buf), "%s,%s,%s,%g,%s,%s,%d\n", name(c.t.u_r), name(c.t.u),
                        name(c.t.u_f), c.alpha, name(results[i].status), fmt_rres(results[i]).c_str(),
                        results[i].iters);
        os << buf;
      }
      return 0;
    }

    if (gpr_cmd->parsed()) {
      auto parse_sizes = [](const std::string& s) {
        std::vector<index_t> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoll(tok));
        return out;
      };
      const auto train_sizes = parse_sizes(train_sizes_str);
      const auto target_sizes = parse_sizes(target_sizes_str);
      if (train_sizes.size() < 3) {
        std::cerr << "gpr: at least 3 training sizes required\n";
        return 1;
      }
      ProblemBuilder builder = [](index_t n) {
        auto prob = build_convdiff3d({n});
        LinearProblem lp;
        lp.split = hss_split(prob.A);
        lp.A = std::move(prob.A);
        lp.b = std::move(prob.b);
        return lp;
      };
      DichotomySettings st;
      st.alpha_lo = grid_lo;
      st.alpha_hi = grid_hi;
      st.budget = grid_points;
      st.train_xi = train_xi;
      st.max_outer = train_cap;

      struct Mode {
        Precision fmt;
        TrainingSet ts;
        GprModel model;
        double seconds = 0.0;
      };
      std::vector<Mode> modes;
      if (gpr_fmt == "both" || gpr_fmt == "single") modes.push_back({Precision::Single, {}, {}, 0.0});
      if (gpr_fmt == "both" || gpr_fmt == "double") modes.push_back({Precision::Double, {}, {}, 0.0});
      if (modes.empty()) {
        std::cerr << "gpr: --fmt must be single, double, or both\n";
        return 1;
      }
      for (auto& m : modes) {
        const auto t0 = std::chrono::steady_clock::now();
        m.ts = generate_training_set(builder, train_sizes, m.fmt, st);
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m.model = fit(m.ts);
        std::cerr << "training-set generation in " << name(m.fmt) << ": " << m.seconds << " s\n";
      }

      auto& os = open_out(file, out_path);
      os << "n_per_direction,n";
      for (const auto& m : modes) os << ",alpha_" << (m.fmt == Precision::Single ? "fp32" : "fp64");
      os << "\n";
      for (index_t tn : target_sizes) {
        const index_t dim = tn * tn * tn;
        os << tn << "," << dim;
        char buf[32];
        for (const auto& m : modes) {
          std::snprintf(buf, sizeof(buf), ",%.4f", predict_alpha(m.model, dim).first);
          os << buf;
        }
        os << "\n";
      }
      if (!train_out.empty()) {
        std::ofstream tf(train_out);
        for (const auto& m : modes) write_training_csv(tf, m.ts);
      }
      if (!model_out.empty()) {
        json jm = json::array();
        for (const auto& m : modes) {
          json one;
          one["generation_precision"] = name(m.fmt);
          one["sigma_f2"] = m.model.sigma_f2;
          one["length"] = m.model.length;
          one["sigma_n2"] = m.model.sigma_n2;
          one["inputs_log_n"] = m.model.inputs;
          one["targets_alpha"] = m.model.targets;
          one["generation_seconds"] = m.seconds;
          jm.push_back(one);
        }
        std::ofstream mf(model_out);
        mf << jm.dump(2) << "\n";
      }
      return 0;
    }

    if (bounds_cmd->parsed()) {
      if (!(alpha > 0.0)) {
        std::cerr << "bounds: --alpha is required and must be positive\n";
        return 1;
      }
      if (ps.family != "convdiff3d") {
        std::cerr << "bounds: only convdiff3d instances are supported\n";
        return 1;
      }
      const Triple t = parse_triple(prec_str);
      auto prob = build_convdiff3d({ps.n});
      auto s = hss_split(prob.A);
      Precisions prec{t.u_r, t.u, t.u_f};
      std::optional<BoundConstants> override_consts;
      if (b_lambda >= 0.0 || b_phi2 >= 0.0 || b_gamma != 1.1) {
        auto [smax_m, smin_m] = sigma_extremes(s.M);
        auto [smax_n, smin_n] = sigma_extremes(s.N);
        BoundConstants c = default_constants(
            prob.A, s, alpha, opt.omega, unit_roundoff(t.u_r),
            (alpha + smax_m) / (alpha + smin_m), (alpha + smax_n) / (alpha + smin_n));
        if (b_lambda >= 0.0) c.lambda = b_lambda;
        if (b_phi2 >= 0.0) c.phi2_of_n = b_phi2;
        c.gamma = b_gamma;
        override_consts = c;
      }
      const BoundReport br =
          predict(prob.A, s, alpha, opt.omega, prec, override_consts ? &*override_consts : nullptr);

      const GadiConfig cfg = make_config(t, alpha, opt);
      auto res = gadi_ir_solve(prob.A, prob.b, s, cfg);

      json j;
      j["problem"] = problem_str;
      j["alpha"] = alpha;
      j["omega"] = opt.omega;
      j["precisions"] = {{"u_r", name(t.u_r)}, {"u", name(t.u)}, {"u_f", name(t.u_f)}};
      j["bound_report"] = {{"alpha_F", br.alpha_F},
                           {"beta_F", br.beta_F},
                           {"alpha_B", br.alpha_B},
                           {"beta_B", br.beta_B},
                           {"kappa_hat", br.kappa_hat},
                           {"limiting_accuracy", br.limiting_accuracy},
                           {"predicts_convergence", br.predicts_convergence},
                           {"lambda", br.constants.lambda},
                           {"theta", br.constants.theta},
                           {"gamma", br.constants.gamma},
                           {"phi2_of_n", br.constants.phi2_of_n}};
      j["measured"] = report_json(res.report, false);
      open_out(file, out_path) << j.dump(2) << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
