#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wcstlab/errors.hpp"
#include "wcstlab/service/batch.hpp"
#include "wcstlab/service/dataset.hpp"
#include "wcstlab/service/pipeline.hpp"
#include "wcstlab/service/server.hpp"

using namespace wcst;

namespace {

struct SessionFlags {
  int blocks = 6;
  int streak = 10;
  double window = 3.0;
  int max_trials = 512;

  void add(CLI::App* cmd) {
    cmd->add_option("--blocks", blocks, "Rule blocks per session")->capture_default_str();
    cmd->add_option("--streak", streak, "Consecutive correct answers that end a block")->capture_default_str();
    cmd->add_option("--window", window, "Response window in seconds")->capture_default_str();
    cmd->add_option("--max-trials", max_trials, "Trial budget per session")->capture_default_str();
  }
  task::SessionConfig config(std::uint64_t seed) const {
    task::SessionConfig c;
    c.seed = seed;
    c.n_blocks = blocks;
    c.switch_streak = streak;
    c.response_window = window;
    c.max_trials = max_trials;
    c.validate();
    return c;
  }
};

std::vector<task::Choice> parse_script(const std::string& text) {
  std::vector<task::Choice> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "t" || item == "timeout") {
      out.push_back(task::Choice::timeout());
    } else {
      try {
        out.push_back(task::Choice::key(std::stoi(item)));
      } catch (const std::invalid_argument&) {
        throw ConfigError(fmt::format("bad script entry '{}'", item));
      }
    }
  }
  if (out.empty()) throw ConfigError("script must list at least one choice");
  return out;
}

service::HttpServer* active_server = nullptr;

void on_signal(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wcstlab: card-sorting task engine, agents and EEG/ERP analysis"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  std::string bind = "127.0.0.1:8080";
  std::uint64_t serve_seed = 0;
  SessionFlags serve_flags;
  serve->add_option("--bind", bind, "host:port to listen on")->envname("WCST_BIND")->capture_default_str();
  serve->add_option("--seed", serve_seed, "Base seed for sessions created without one")->envname("WCST_SEED");
  serve_flags.add(serve);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run closed-loop sessions and print a metrics report");
  std::vector<std::string> agent_names{"oracle"};
  int n_sessions = 1;
  std::uint64_t sim_seed = 0;
  SessionFlags sim_flags;
  std::string script, endpoint, csv_path, log_dir;
  double remote_timeout = 30.0, lapse = 0.0;
  bool strict = false, per_lower = false;
  int threads = 0;
  simulate->add_option("-a,--agent", agent_names, "oracle|random|hypothesis|perseverative|scripted|remote (repeatable)")
      ->capture_default_str();
  simulate->add_option("-n,--sessions", n_sessions, "Sessions per agent")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Seed of the first session")->envname("WCST_SEED");
  sim_flags.add(simulate);
  simulate->add_option("--script", script, "Scripted agent choices, e.g. 1,2,3,4");
  simulate->add_option("--endpoint", endpoint, "Remote agent URL (http://host:port/path)");
  simulate->add_option("--remote-timeout", remote_timeout, "Remote agent timeout in seconds")->capture_default_str();
  simulate->add_flag("--strict", strict, "Only accept {\"choice\": n} replies from remote agents");
  simulate->add_option("--lapse", lapse, "Hypothesis agent lapse rate")->capture_default_str();
  simulate->add_option("--threads", threads, "Worker threads (0: all cores)");
  simulate->add_option("--csv", csv_path, "Write per-session metrics CSV here");
  simulate->add_option("--log-dir", log_dir, "Write each session's trial log here");
  simulate->add_flag("--per-lower-is-better", per_lower, "Mark the lowest PER as best");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Run the EEG/ERP pipeline described by a config file");
  std::string config_path, out_override;
  std::optional<int> permutations, decimation;
  std::optional<std::uint64_t> cluster_seed;
  analyze->add_option("-c,--config", config_path, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  analyze->add_option("-o,--out", out_override, "Override output_dir");
  analyze->add_option("--permutations", permutations, "Override cluster.n_permutations");
  analyze->add_option("--cluster-seed", cluster_seed, "Override cluster.seed");
  analyze->add_option("--ica-decimation", decimation, "Override ica.fit_decimation");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic multi-participant dataset and pipeline config");
  service::DatasetSpec ds;
  std::string synth_out;
  bool no_effect = false;
  synth->add_option("-o,--out", synth_out, "Output directory")->required();
  synth->add_option("--participants", ds.n_participants)->capture_default_str();
  synth->add_option("--seed", ds.seed)->envname("WCST_SEED");
  synth->add_option("--fs", ds.fs, "Sampling rate in Hz")->capture_default_str();
  synth->add_option("--blocks", ds.n_blocks, "Rule blocks per participant session")->capture_default_str();
  synth->add_option("--lapse", ds.lapse_rate, "Agent lapse rate")->capture_default_str();
  synth->add_option("--line-noise", ds.line_noise_uv, "Line noise per harmonic in uV (0: off)")->capture_default_str();
  synth->add_option("--effect-uv", ds.effect_uv, "SEARCH-only stimulus-locked deflection")->capture_default_str();
  synth->add_flag("--no-effect", no_effect, "Do not inject the SEARCH effect");
  synth->add_option("--ica-decimation", ds.ica_fit_decimation, "ica.fit_decimation in the written config")
      ->capture_default_str();
  synth->add_option("--permutations", ds.n_permutations, "cluster.n_permutations in the written config")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      service::ServiceConfig sc;
      sc.defaults = serve_flags.config(0);
      sc.base_seed = serve_seed;
      service::SessionService svc(sc, std::make_shared<service::SteadyClock>());
      service::HttpServer server(svc);
      const int port = server.bind(service::BindAddress::parse(bind));
      active_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      fmt::print("listening on {}:{}\n", service::BindAddress::parse(bind).host, port);
      std::fflush(stdout);
      server.listen();
      active_server = nullptr;
    } else if (simulate->parsed()) {
      std::vector<service::BatchResult> batches;
      for (const auto& name : agent_names) {
        service::BatchOptions opt;
        opt.agent.kind = agents::agent_kind_from_string(name);
        opt.agent.seed = sim_seed;
        opt.agent.endpoint = endpoint;
        opt.agent.remote_timeout_s = remote_timeout;
        opt.agent.strict = strict;
        opt.agent.lapse_rate = lapse;
        if (!script.empty()) opt.agent.script = parse_script(script);
        opt.session = sim_flags.config(sim_seed);
        opt.n_sessions = n_sessions;
        opt.threads = threads;
        batches.push_back(service::run_batch(opt));
      }
      for (const auto& b : batches) {
        for (std::size_t i = 0; i < b.sessions.size(); ++i) {
          const auto& s = b.sessions[i];
          if (!s.error.empty()) fmt::print(stderr, "{} session {}: {}\n", b.label, i, s.error);
          if (!log_dir.empty() && s.log) {
            std::filesystem::create_directories(log_dir);
            s.log->write_file((std::filesystem::path(log_dir) / fmt::format("{}_{:03d}.jsonl", b.label, i)).string());
          }
        }
      }
      metrics::ReportOptions ro;
      ro.per_higher_is_better = !per_lower;
      fmt::print("{}", service::batch_report(batches, ro).to_text());
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << service::sessions_csv(batches);
      }
    } else if (analyze->parsed()) {
      auto cfg = service::PipelineConfig::load(config_path);
      if (!out_override.empty()) cfg.output_dir = std::filesystem::absolute(out_override).string();
      if (permutations) cfg.cluster.n_permutations = *permutations;
      if (cluster_seed) cfg.cluster.seed = *cluster_seed;
      if (decimation) cfg.ica.fit_decimation = *decimation;
      cfg.validate();
      const auto result = service::run_pipeline(cfg);
      for (const auto& band : result.band_names) {
        const auto& a = result.clusters.at(band);
        int sig = 0;
        for (const auto& c : a.clusters) sig += c.significant ? 1 : 0;
        fmt::print("{:<10} clusters {:>4}  significant {:>3}\n", band, a.clusters.size(), sig);
      }
      fmt::print("wrote {} files to {}\n", result.written.size(), cfg.resolve(cfg.output_dir));
    } else if (synth->parsed()) {
      ds.search_effect = !no_effect;
      const auto r = service::write_dataset(ds, synth_out);
      fmt::print("wrote {} participants; run: wcstlab analyze -c {}\n", r.participant_ids.size(), r.config_path);
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
