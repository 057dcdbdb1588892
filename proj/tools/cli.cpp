#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "lossq/asymptotics.hpp"
#include "lossq/error.hpp"
#include "lossq/mcoracle.hpp"
#include "lossq/recurrence.hpp"
#include "lossq/report.hpp"
#include "lossq/sim.hpp"

namespace lossq::cli {

namespace {

enum class Format { human, csv, json };

struct Options {
  std::string dist = "exp";
  double mu = 1.0;
  int m = 1;
  int n = 0;
  std::optional<double> rho;
  std::string format = "human";
  std::string out_path;
  std::uint64_t seed = SimConfig{}.seed;
  std::int64_t arrivals = SimConfig{}.arrivals_total;
  std::int64_t warmup = SimConfig{}.warmup_arrivals;
  int reps = SimConfig{}.replications;
  int threads = 0;
  std::string regime = "auto";
  std::optional<double> C;
  std::string dump_path;
  bool no_sim = false;
};

const std::vector<int> kTableBuffers{10, 15, 20, 25, 30, 35, 40, 45, 50, 100};
constexpr double kTableLoad = 0.999;

Format parse_format(const std::string& s) {
  if (s == "human") return Format::human;
  if (s == "csv") return Format::csv;
  return Format::json;
}

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

QueueModel model_from(const Options& o) {
  const auto d = parse_distribution(o.dist);
  if (o.rho) return QueueModel::with_load(d, o.m, o.n, o.mu, *o.rho);
  QueueModel model{o.m, o.n, o.mu, d};
  model.validate();
  return model;
}

SimConfig sim_config(const Options& o, const QueueModel& model) {
  SimConfig c;
  c.model = model;
  c.arrivals_total = o.arrivals;
  c.warmup_arrivals = o.warmup;
  c.replications = o.reps;
  c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

void write_result(std::ostream& out, Format fmt, const QueueModel& model, const LossResult& r) {
  switch (fmt) {
    case Format::json:
      out << result_json(model, r).dump(2) << '\n';
      break;
    case Format::csv:
      out << "model,method,p,pi_log\n";
      out << '"' << model.describe() << "\"," << method_name(r.method) << ',' << num(r.p) << ','
          << num(r.diagnostics.pi_log) << '\n';
      break;
    case Format::human:
      out << "model   " << model.describe() << '\n';
      out << "method  " << method_name(r.method) << '\n';
      out << "p       " << num(r.p) << '\n';
      out << "pi_log  " << num(r.diagnostics.pi_log) << '\n';
      if (r.diagnostics.regime) {
        const auto& g = *r.diagnostics.regime;
        out << "regime  " << regime_name(g.kind) << '\n';
        out << "rho2    " << num(g.rho2) << '\n';
        if (g.sigma_m) out << "sigma_m " << num(*g.sigma_m) << '\n';
        if (g.k_m) out << "K_m     " << num(*g.k_m) << '\n';
        if (g.C) out << "C       " << num(*g.C) << '\n';
      }
      if (!r.diagnostics.formula.empty()) out << "formula " << r.diagnostics.formula << '\n';
      if (r.diagnostics.ci_halfwidth) out << "ci95    " << num(*r.diagnostics.ci_halfwidth) << '\n';
      break;
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

void cmd_exact(const Options& o, std::ostream& out) {
  const QueueModel model = model_from(o);
  const KernelSet ks = build_kernel_set(model);
  spdlog::debug("kernels built for {}: interior tail {:.3e}", model.describe(), ks.interior_tail);
  if (!o.dump_path.empty()) write_json_file(o.dump_path, kernels_json(ks));
  write_result(out, parse_format(o.format), model, loss_gimmn(model, ks));
}

void cmd_oracle(const Options& o, std::ostream& out) {
  const QueueModel model = model_from(o);
  const EmbeddedChain chain = build_chain(model);
  const auto pi = stationary_vector(chain);
  spdlog::debug("chain of {} states, row sum error {:.3e}", chain.states(), chain.row_sum_error());
  if (!o.dump_path.empty()) write_json_file(o.dump_path, chain_json(chain, pi));
  LossResult r;
  r.method = Method::mc_oracle;
  r.p = pi.back();
  r.diagnostics.pi_log = -std::log(r.p);
  write_result(out, parse_format(o.format), model, r);
}

RegimeRequest regime_request(const Options& o) {
  RegimeRequest req;
  req.heavy = o.regime == "heavy";
  req.C = o.C;
  return req;
}

void cmd_asymptotic(const Options& o, std::ostream& out) {
  const QueueModel model = model_from(o);
  write_result(out, parse_format(o.format), model, asymptotic_estimate(model, regime_request(o)));
}

void cmd_simulate(const Options& o, std::ostream& out) {
  const QueueModel model = model_from(o);
  const SimConfig config = sim_config(o, model);
  const auto t0 = std::chrono::steady_clock::now();
  const SimEstimate est = simulate(config);
  spdlog::info("simulated {} arrivals in {:.2f} s", est.arrivals_counted,
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  const Format fmt = parse_format(o.format);
  if (fmt == Format::csv) {
    out << sim_csv_header() << '\n' << sim_csv_row(config, est) << '\n';
    return;
  }
  LossResult r;
  r.method = Method::simulation;
  r.p = est.p_hat;
  r.diagnostics.pi_log = est.p_hat > 0.0 ? -std::log(est.p_hat) : INFINITY;
  r.diagnostics.stderr_p = est.stderr_p;
  r.diagnostics.ci_halfwidth = est.ci95_halfwidth;
  if (fmt == Format::json) {
    json j = result_json(model, r);
    j["simulation"] = est;
    j["seed"] = config.seed;
    out << j.dump(2) << '\n';
    return;
  }
  write_result(out, fmt, model, r);
  out << "stderr  " << num(est.stderr_p) << '\n';
  out << "losses  " << est.losses << " of " << est.arrivals_counted << '\n';
}

struct TableRow {
  int n;
  double theoretical;
  std::optional<SimEstimate> sim[2];
  double exact[2];
};

void cmd_table(const Options& o, std::ostream& out) {
  const auto shape = parse_distribution("det");
  std::vector<TableRow> rows;
  for (int n : kTableBuffers) {
    TableRow row{};
    row.n = n;
    for (int m = 1; m <= 2; ++m) {
      const QueueModel model = QueueModel::with_load(shape, m, n, 1.0, kTableLoad);
      if (m == 1) {
        const double rho2 = model.arrivals.moments(m * model.mu).rho2;
        row.theoretical = theorem2_estimate(rho2, 1.0 - kTableLoad, n);
      }
      row.exact[m - 1] = loss_gimmn(model).p;
      if (!o.no_sim) {
        SimConfig c = sim_config(o, model);
        c.seed = o.seed + 1000ULL * m + n;
        row.sim[m - 1] = simulate(c);
        spdlog::info("D/M/{}/{} simulated p = {:.5f}", m, n, row.sim[m - 1]->p_hat);
      }
    }
    rows.push_back(row);
  }

  auto sim_cell = [](const std::optional<SimEstimate>& s) { return s ? num(s->p_hat) : ""; };
  const Format fmt = parse_format(o.format);
  if (fmt == Format::json) {
    json arr = json::array();
    for (const auto& r : rows) {
      json j{{"n", r.n}, {"theoretical", r.theoretical}, {"exact_m1", r.exact[0]},
             {"exact_m2", r.exact[1]}};
      if (r.sim[0]) j["sim_m1"] = *r.sim[0];
      if (r.sim[1]) j["sim_m2"] = *r.sim[1];
      arr.push_back(j);
    }
    out << json{{"rho", kTableLoad}, {"mu", 1.0}, {"seed", o.seed}, {"rows", arr}}.dump(2) << '\n';
  } else if (fmt == Format::csv) {
    out << "n,theoretical,sim_m1,sim_m2,exact_m1,exact_m2\n";
    for (const auto& r : rows) {
      out << r.n << ',' << num(r.theoretical) << ',' << sim_cell(r.sim[0]) << ','
          << sim_cell(r.sim[1]) << ',' << num(r.exact[0]) << ',' << num(r.exact[1]) << '\n';
    }
  } else {
    out << "D/M/1/n and D/M/2/n at rho = 0.999, mu = 1\n";
    out << std::setw(5) << "n" << std::setw(13) << "theoretical" << std::setw(11) << "sim m=1"
        << std::setw(11) << "sim m=2" << std::setw(11) << "exact m=1" << std::setw(11)
        << "exact m=2" << '\n';
    out << std::fixed;
    for (const auto& r : rows) {
      out << std::setw(5) << r.n << std::setw(13) << std::setprecision(4) << r.theoretical;
      for (const auto& s : r.sim) {
        if (s) {
          out << std::setw(11) << std::setprecision(5) << s->p_hat;
        } else {
          out << std::setw(11) << "-";
        }
      }
      out << std::setw(11) << std::setprecision(5) << r.exact[0] << std::setw(11) << r.exact[1]
          << '\n';
    }
    out << std::defaultfloat;
  }
}

void cmd_compare(const Options& o, std::ostream& out) {
  const QueueModel model = model_from(o);
  const KernelSet ks = build_kernel_set(model);
  const LossResult exact = loss_gimmn(model, ks);
  std::vector<LossResult> rows{exact};
  rows.push_back(loss_oracle(model));
  try {
    rows.push_back(asymptotic_estimate(model, regime_request(o)));
  } catch (const std::exception& e) {
    spdlog::warn("asymptotic estimate unavailable: {}", e.what());
  }
  auto rel = [&](const LossResult& r) { return r.p / exact.p - 1.0; };
  auto regime = [](const LossResult& r) {
    return r.diagnostics.regime ? std::string(regime_name(r.diagnostics.regime->kind)) : "";
  };

  const Format fmt = parse_format(o.format);
  if (fmt == Format::json) {
    json arr = json::array();
    for (const auto& r : rows) {
      json j = r;
      j["rel_error"] = rel(r);
      arr.push_back(j);
    }
    out << json{{"model", model}, {"results", arr}}.dump(2) << '\n';
  } else if (fmt == Format::csv) {
    out << "model,method,p,rel_error,regime\n";
    for (const auto& r : rows) {
      out << '"' << model.describe() << "\"," << method_name(r.method) << ',' << num(r.p) << ','
          << num(rel(r)) << ',' << regime(r) << '\n';
    }
  } else {
    out << model.describe() << '\n';
    out << std::left << std::setw(20) << "method" << std::setw(22) << "p" << std::setw(16)
        << "rel_error" << "regime\n";
    for (const auto& r : rows) {
      out << std::setw(20) << method_name(r.method) << std::setw(22) << num(r.p) << std::setw(16)
          << num(rel(r)) << regime(r) << '\n';
    }
    out << std::right;
  }
}

void configure_logging(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("lossq", sink);
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("LOSSQ_LOG")) level = spdlog::level::from_str(env);
  logger->set_level(level);
  spdlog::set_default_logger(logger);
}

void add_model_options(CLI::App* sub, Options& o) {
  sub->add_option("--dist", o.dist, "Interarrival law, e.g. det:a=1, erlang:k=2,rate=2")
      ->capture_default_str();
  sub->add_option("--mu", o.mu, "Service rate per server")->capture_default_str();
  sub->add_option("--m", o.m, "Number of servers")->capture_default_str();
  sub->add_option("--n", o.n, "Number of waiting places")->capture_default_str();
  sub->add_option("--rho", o.rho, "Rescale the interarrival mean to this load");
}

void add_output_options(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"human", "csv", "json"}))
      ->capture_default_str();
  sub->add_option("--out", o.out_path, "Write the report to this file");
}

void add_sim_options(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Base RNG seed")->capture_default_str();
  sub->add_option("--arrivals", o.arrivals, "Arrivals per replication, warmup included")
      ->capture_default_str();
  sub->add_option("--warmup", o.warmup, "Warmup arrivals per replication")->capture_default_str();
  sub->add_option("--reps", o.reps, "Replications")->capture_default_str();
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void add_regime_options(CLI::App* sub, Options& o) {
  sub->add_option("--regime", o.regime, "auto classifies by rho; heavy uses the eps*n -> C form")
      ->check(CLI::IsMember({"auto", "heavy"}))
      ->capture_default_str();
  sub->add_option("--C", o.C, "C for the heavy-traffic form (default eps*n)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loss probabilities of GI/M/m/n queues", "lossq"};
  app.require_subcommand(1);
  Options o;

  auto* exact = app.add_subcommand("exact", "Exact loss probability");
  add_model_options(exact, o);
  add_output_options(exact, o);
  exact->add_option("--kernels", o.dump_path, "Write the kernel set as JSON to this file");

  auto* oracle = app.add_subcommand("oracle", "Loss from the dense embedded chain");
  add_model_options(oracle, o);
  add_output_options(oracle, o);
  oracle->add_option("--dump", o.dump_path, "Write P and the stationary vector as JSON");

  auto* asym = app.add_subcommand("asymptotic", "Large-n estimate");
  add_model_options(asym, o);
  add_output_options(asym, o);
  add_regime_options(asym, o);

  auto* sim = app.add_subcommand("simulate", "Discrete-event simulation");
  add_model_options(sim, o);
  add_output_options(sim, o);
  add_sim_options(sim, o);

  auto* table = app.add_subcommand("table", "D/M/1/n and D/M/2/n comparison at rho = 0.999");
  add_output_options(table, o);
  add_sim_options(table, o);
  table->add_flag("--no-sim", o.no_sim, "Leave the simulated columns empty");

  auto* compare = app.add_subcommand("compare", "Exact, oracle and asymptotic side by side");
  add_model_options(compare, o);
  add_output_options(compare, o);
  add_regime_options(compare, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  configure_logging(err);
  try {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!o.out_path.empty()) {
      file.open(o.out_path);
      if (!file) throw DomainError("cannot open '" + o.out_path + "' for writing");
      sink = &file;
    }
    if (exact->parsed()) cmd_exact(o, *sink);
    if (oracle->parsed()) cmd_oracle(o, *sink);
    if (asym->parsed()) cmd_asymptotic(o, *sink);
    if (sim->parsed()) cmd_simulate(o, *sink);
    if (table->parsed()) cmd_table(o, *sink);
    if (compare->parsed()) cmd_compare(o, *sink);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace lossq::cli
