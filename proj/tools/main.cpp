// gompsnr: batch scoring, loss evaluation and correlation analysis for the
// GOMPSNR metric family.
//
// Exit codes: 0 success, 2 input error, 3 computation error, 4 I/O error.
// Expected failures print a machine-readable {"error": {code, message}}
// object on stderr, never a stack trace.

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gompsnr/error.hpp"
#include "gompsnr/losses.hpp"
#include "gompsnr/manifest.hpp"
#include "gompsnr/metrics.hpp"
#include "gompsnr/report.hpp"
#include "gompsnr/selfcheck.hpp"
#include "gompsnr/stats.hpp"
#include "gompsnr/stft.hpp"
#include "gompsnr/wave.hpp"

using namespace gompsnr;
using ordered_json = nlohmann::ordered_json;

namespace {

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::io_failure:
      return 4;
    case Errc::silent_reference:
    case Errc::shape_mismatch:
    case Errc::constant_input:
    case Errc::too_few:
      return 3;
    default:
      return 2;
  }
}

void print_error(const Error& e) {
  ordered_json j;
  j["error"] = ordered_json{{"code", e.code_name()}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
}

// Writes to --output or stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_failure, "cannot open " + path + " for writing");
  out << text;
  if (!out) raise(Errc::io_failure, "write failed for " + path);
}

struct CommonOpts {
  StftConfig stft;
  bool no_center = false;
  double eps = kDefaultDenomEps;
  std::string align = "strict";
  std::string format = "json";
  std::string output;

  StftConfig config() const {
    StftConfig cfg = stft;
    cfg.fft_size = cfg.window_size;
    cfg.center = !no_center;
    return cfg;
  }
  AlignPolicy align_policy() const {
    return align == "truncate" ? AlignPolicy::truncate : AlignPolicy::strict;
  }
  ReportFormat report_format() const {
    return format == "csv" ? ReportFormat::csv : ReportFormat::json;
  }
};

void add_stft_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--window-size", o.stft.window_size, "STFT window size")
      ->capture_default_str();
  cmd->add_option("--hop-size", o.stft.hop_size, "STFT hop size")
      ->capture_default_str();
  cmd->add_flag("--no-center", o.no_center, "disable reflect-padded centering");
}

void add_io_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--output", o.output, "output path (default stdout)");
}

Waveform load_mono(const std::string& path) {
  return load_waveform(path, LoadOptions{});
}

// ---- score ----

int cmd_score(const std::string& ref_path, const std::string& est_path,
              const CommonOpts& opts) {
  Waveform ref = load_mono(ref_path);
  Waveform est = load_mono(est_path);
  ScoredPair sp = score_pair(est_path, ref, est, opts.config(),
                             opts.align_policy(), opts.eps);
  std::ostringstream out;
  write_report({sp.report}, opts.report_format(), out);
  emit(opts.output, out.str());
  return 0;
}

// ---- batch ----

struct PairOutcome {
  bool ok = false;
  ScoredPair scored;
  std::string code;
  std::string message;
};

std::vector<PairOutcome> run_batch(const std::vector<PairManifestEntry>& entries,
                                   const CommonOpts& opts, unsigned jobs) {
  std::vector<PairOutcome> outcomes(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < entries.size();) {
      PairOutcome& out = outcomes[i];
      try {
        Waveform ref = load_mono(entries[i].ref_path);
        Waveform est = load_mono(entries[i].est_path);
        out.scored = score_pair(entries[i].id, ref, est, opts.config(),
                                opts.align_policy(), opts.eps);
        out.ok = true;
      } catch (const Error& e) {
        out.code = e.code_name();
        out.message = e.what();
      } catch (const std::exception& e) {
        out.code = "internal";
        out.message = e.what();
      }
    }
  };
  jobs = std::max(1u, jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return outcomes;
}

ordered_json batch_summary(const std::vector<PairOutcome>& outcomes,
                           const std::string& aggregation) {
  const char* names[4] = {"snr_time_db", "snr_tf_db", "ompsnr_db", "gompsnr_db"};
  ordered_json infinite;
  ordered_json mean;
  std::size_t failed = 0;
  for (const auto& o : outcomes) failed += !o.ok;

  for (int m = 0; m < 4; ++m) {
    auto value_of = [&](const MetricReport& r) {
      switch (m) {
        case 0: return r.snr_time_db;
        case 1: return r.snr_tf_db;
        case 2: return r.ompsnr_db;
        default: return r.gompsnr_db;
      }
    };
    std::size_t inf_count = 0;
    if (aggregation == "pooled") {
      double num = 0.0, den = 0.0;
      bool any = false;
      for (const auto& o : outcomes) {
        if (!o.ok) continue;
        any = true;
        if (std::isinf(value_of(o.scored.report))) ++inf_count;
        const MetricEnergies& e = o.scored.energies;
        switch (m) {
          case 0: num += e.time_signal; den += e.time_residual; break;
          case 1: num += e.tf_signal; den += e.denom_snr; break;
          case 2: num += e.tf_signal; den += e.denom_ompsnr; break;
          default: num += e.tf_signal; den += e.denom_gompsnr; break;
        }
      }
      if (!any) {
        mean[names[m]] = nullptr;
      } else if (den <= 0.0) {
        mean[names[m]] = "inf";
      } else {
        mean[names[m]] = 10.0 * std::log10(num / den);
      }
    } else {
      double acc = 0.0;
      std::size_t n = 0;
      for (const auto& o : outcomes) {
        if (!o.ok) continue;
        double v = value_of(o.scored.report);
        if (std::isinf(v)) {
          ++inf_count;
        } else {
          acc += v;
          ++n;
        }
      }
      if (n == 0) {
        mean[names[m]] = nullptr;
      } else {
        mean[names[m]] = acc / static_cast<double>(n);
      }
    }
    infinite[names[m]] = inf_count;
  }

  ordered_json summary;
  summary["pairs"] = outcomes.size();
  summary["failed"] = failed;
  summary["infinite"] = infinite;
  summary["aggregation"] = aggregation;
  summary["mean"] = mean;
  return summary;
}

int cmd_batch(const std::string& manifest_path, const CommonOpts& opts,
              const std::string& aggregation, unsigned jobs) {
  auto entries = read_manifest(manifest_path);
  auto outcomes = run_batch(entries, opts, jobs);
  ordered_json summary = batch_summary(outcomes, aggregation);

  if (opts.report_format() == ReportFormat::json) {
    ordered_json reports = ordered_json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i].ok) {
        reports.push_back(report_to_json(outcomes[i].scored.report));
      } else {
        ordered_json rec;
        rec["id"] = entries[i].id;
        rec["error"] = ordered_json{{"code", outcomes[i].code},
                                    {"message", outcomes[i].message}};
        reports.push_back(rec);
      }
    }
    ordered_json doc;
    doc["reports"] = reports;
    doc["summary"] = summary;
    emit(opts.output, doc.dump(2) + "\n");
  } else {
    std::vector<MetricReport> ok;
    for (const auto& o : outcomes) {
      if (o.ok) ok.push_back(o.scored.report);
    }
    std::ostringstream out;
    if (ok.empty()) {
      out << "id,snr_time_db,snr_tf_db,ompsnr_db,gompsnr_db,settings\n";
    } else {
      write_report(ok, ReportFormat::csv, out);
    }
    emit(opts.output, out.str());
    // error records and the summary stay machine readable on stderr
    ordered_json side;
    side["summary"] = summary;
    ordered_json errors = ordered_json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!outcomes[i].ok) {
        errors.push_back(ordered_json{{"id", entries[i].id},
                                      {"code", outcomes[i].code},
                                      {"message", outcomes[i].message}});
      }
    }
    side["errors"] = errors;
    std::cerr << side.dump() << '\n';
  }
  return 0;
}

// ---- loss ----

int cmd_loss(const std::string& ref_path, const std::string& est_path,
             const std::string& kind_name, const std::string& distance_name,
             bool with_grad, const CommonOpts& opts) {
  LossKind kind = kind_name == "op"    ? LossKind::op
                  : kind_name == "wop" ? LossKind::wop
                  : kind_name == "ori" ? LossKind::ori
                                       : LossKind::cori;
  Distance dist = distance_name == "l2" ? Distance::l2 : Distance::l1;

  Waveform ref = load_mono(ref_path);
  Waveform est = load_mono(est_path);
  StftConfig cfg = opts.config();
  auto [r, e] = align_pair(std::move(ref), std::move(est), opts.align_policy(),
                           cfg.window_size);
  MagPhase mp_ref = to_mag_phase(stft(r, cfg));
  MagPhase mp_est = to_mag_phase(stft(e, cfg));
  LossResult res = evaluate_loss(kind, dist, mp_ref, mp_est, with_grad);

  ordered_json j;
  j["kind"] = kind_name;
  if (kind == LossKind::ori || kind == LossKind::cori) {
    j["distance"] = distance_name;
  }
  j["value"] = res.value;
  auto grad_stats = [](const Grid& g) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    double sq = 0.0;
    for (double v : g.data()) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      sq += v * v;
    }
    return ordered_json{{"min", mn}, {"max", mx}, {"l2_norm", std::sqrt(sq)}};
  };
  if (res.grad_phase_est) j["grad_phase_est"] = grad_stats(*res.grad_phase_est);
  if (res.grad_mag_est) j["grad_mag_est"] = grad_stats(*res.grad_mag_est);
  j["settings"] = stft_config_to_json(cfg);
  emit(opts.output, j.dump(2) + "\n");
  return 0;
}

// ---- corr ----

int cmd_corr(const std::string& table_path, const std::string& metrics_arg,
             const CommonOpts& opts) {
  std::vector<std::string> targets;
  std::stringstream ss(metrics_arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) targets.push_back(item);
  }
  ScoreTable table = read_score_table(table_path);
  CorrelationMatrix m = correlation_matrix(table, targets);
  if (m.n_dropped > 0) {
    std::cerr << "dropped " << m.n_dropped
              << " rows with infinite or missing values\n";
  }

  if (opts.format == "csv") {
    std::ostringstream out;
    out << "metric_a,metric_b,pcc,srcc\n";
    for (std::size_t a = 0; a < targets.size(); ++a) {
      for (std::size_t b = a; b < targets.size(); ++b) {
        out << targets[a] << ',' << targets[b] << ',' << m.pcc(a, b) << ','
            << m.srcc(a, b) << '\n';
      }
    }
    emit(opts.output, out.str());
  } else {
    ordered_json j;
    j["metrics"] = targets;
    j["n_samples"] = m.n_samples;
    j["n_dropped"] = m.n_dropped;
    ordered_json pcc_rows = ordered_json::array();
    ordered_json srcc_rows = ordered_json::array();
    for (std::size_t a = 0; a < targets.size(); ++a) {
      ordered_json pr = ordered_json::array();
      ordered_json sr = ordered_json::array();
      for (std::size_t b = 0; b < targets.size(); ++b) {
        pr.push_back(m.pcc(a, b));
        sr.push_back(m.srcc(a, b));
      }
      pcc_rows.push_back(pr);
      srcc_rows.push_back(sr);
    }
    j["pcc"] = pcc_rows;
    j["srcc"] = srcc_rows;
    emit(opts.output, j.dump(2) + "\n");
  }
  return 0;
}

// ---- selfcheck ----

int cmd_selfcheck(std::uint64_t seed) {
  SelfcheckResult r = run_selfcheck(SelfcheckOptions{.seed = seed});
  for (const auto& g : r.groups) {
    std::cout << g.name << ": " << (g.passed ? "pass" : "fail");
    if (!g.passed && !g.detail.empty()) std::cout << " (" << g.detail << ")";
    std::cout << '\n';
  }
  return r.all_passed() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GOMPSNR audio quality metrics and phase-aware losses"};
  app.require_subcommand(1);

  CommonOpts score_opts;
  std::string score_ref, score_est;
  auto* score = app.add_subcommand("score", "score one reference/estimate pair");
  score->add_option("ref", score_ref, "reference wav")->required();
  score->add_option("est", score_est, "estimate wav")->required();
  add_stft_flags(score, score_opts);
  add_io_flags(score, score_opts);
  score->add_option("--eps", score_opts.eps, "denominator guard, relative")
      ->capture_default_str();
  score->add_option("--align", score_opts.align, "length alignment policy")
      ->check(CLI::IsMember({"strict", "truncate"}))
      ->capture_default_str();

  CommonOpts batch_opts;
  std::string manifest_path, aggregation = "mean-db";
  unsigned jobs = 1;
  auto* batch = app.add_subcommand("batch", "score a manifest of pairs");
  batch->add_option("manifest", manifest_path, "CSV manifest (id,ref_path,est_path)")
      ->required();
  add_stft_flags(batch, batch_opts);
  add_io_flags(batch, batch_opts);
  batch->add_option("--eps", batch_opts.eps, "denominator guard, relative")
      ->capture_default_str();
  batch->add_option("--align", batch_opts.align, "length alignment policy")
      ->check(CLI::IsMember({"strict", "truncate"}))
      ->capture_default_str();
  batch->add_option("--aggregate", aggregation, "summary aggregation")
      ->check(CLI::IsMember({"mean-db", "pooled"}))
      ->capture_default_str();
  batch->add_option("--jobs", jobs, "worker count")->capture_default_str();

  CommonOpts loss_opts;
  std::string loss_ref, loss_est, loss_kind, loss_distance = "l1";
  bool loss_grad = false;
  auto* loss = app.add_subcommand("loss", "evaluate a phase-aware loss");
  loss->add_option("ref", loss_ref, "reference wav")->required();
  loss->add_option("est", loss_est, "estimate wav")->required();
  loss->add_option("--kind", loss_kind, "loss kind")
      ->check(CLI::IsMember({"op", "wop", "ori", "cori"}))
      ->required();
  loss->add_option("--distance", loss_distance, "point-wise distance for ori/cori")
      ->check(CLI::IsMember({"l1", "l2"}))
      ->capture_default_str();
  loss->add_flag("--grad", loss_grad, "also report gradient statistics");
  add_stft_flags(loss, loss_opts);
  loss->add_option("--align", loss_opts.align, "length alignment policy")
      ->check(CLI::IsMember({"strict", "truncate"}))
      ->capture_default_str();
  loss->add_option("--output", loss_opts.output, "output path (default stdout)");

  CommonOpts corr_opts;
  std::string table_path, metrics_arg;
  auto* corr = app.add_subcommand("corr", "correlate metric columns");
  corr->add_option("scores", table_path, "wide CSV score table")->required();
  corr->add_option("--metrics", metrics_arg, "comma-separated metric names")
      ->required();
  add_io_flags(corr, corr_opts);

  std::uint64_t seed = 0;
  auto* selfcheck = app.add_subcommand("selfcheck", "run the embedded invariant suite");
  selfcheck->add_option("--seed", seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (score->parsed()) return cmd_score(score_ref, score_est, score_opts);
    if (batch->parsed()) return cmd_batch(manifest_path, batch_opts, aggregation, jobs);
    if (loss->parsed()) {
      return cmd_loss(loss_ref, loss_est, loss_kind, loss_distance, loss_grad,
                      loss_opts);
    }
    if (corr->parsed()) return cmd_corr(table_path, metrics_arg, corr_opts);
    if (selfcheck->parsed()) return cmd_selfcheck(seed);
  } catch (const Error& e) {
    print_error(e);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"] = ordered_json{{"code", "internal"}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return 3;
  }
  return 0;
}
