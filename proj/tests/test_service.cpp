#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wcstlab/errors.hpp"
#include "wcstlab/service/batch.hpp"
#include "wcstlab/service/dataset.hpp"
#include "wcstlab/service/pipeline.hpp"
#include "wcstlab/service/pipeline_config.hpp"
#include "wcstlab/service/server.hpp"
#include "wcstlab/service/session_service.hpp"
#include "wcstlab/task/cards.hpp"
#include "wcstlab/task/trial_log.hpp"

// After Eigen: resolv.h (pulled in by httplib) defines _res.
#include <httplib.h>

using namespace wcst;
using namespace wcst::service;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
  return json{{"participants", {{{"id", "p1"}, {"header", "a.vhdr"}, {"log", "a.jsonl"}},
                                {{"id", "p2"}, {"header", "b.vhdr"}, {"log", "b.jsonl"}}}}};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wcstlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Key card k carries attribute k on every dimension.
int key_for(const json& card, task::RuleDimension rule) { return card[task::to_index(rule)].get<int>() + 1; }

}  // namespace

TEST(PipelineConfig, DefaultsAndRoundTrip) {
  const auto c = PipelineConfig::from_json(minimal_config(), "/data");
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.effective_bands().size(), 5u);
  EXPECT_EQ(c.resolve("a.vhdr"), "/data/a.vhdr");
  EXPECT_EQ(c.resolve("/abs/x"), "/abs/x");
  const auto back = PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(PipelineConfig, RejectsBadInput) {
  auto bad = [](json j) { EXPECT_THROW(PipelineConfig::from_json(j).validate(), ConfigError) << j.dump(); };
  auto j = minimal_config();
  j["bands"] = {{{"name", "alpha"}, {"lo", 13}, {"hi", 8}}};
  bad(j);
  j = minimal_config();
  j["colour"] = "blue";
  bad(j);
  j = minimal_config();
  j["cluster"] = {{"n_perms", 10}};
  bad(j);
  j = minimal_config();
  j["participants"].erase(1);
  bad(j);
  j = minimal_config();
  j["participants"][1]["id"] = "p1";
  bad(j);
  j = minimal_config();
  j["epoch"] = {{"lock", "stimulus"}, {"conditions", {"COR", "INC"}}};
  bad(j);
  j = minimal_config();
  j["cluster"] = {{"n_permutations", "many"}};
  bad(j);
  j = minimal_config();
  j["topo"] = {{"end_s", 0.9}};
  bad(j);
  EXPECT_THROW(PipelineConfig::load("/nonexistent/pipeline.json"), ConfigError);
}

TEST(PipelineConfig, SchemaMatchesSerializer) {
  const auto schema = json::parse(read_file(fs::path(WCST_CONFIG_DIR) / "pipeline.schema.json"));
  const auto config = PipelineConfig::load((fs::path(WCST_CONFIG_DIR) / "pipeline.example.json").string());
  const auto doc = config.to_json();
  const auto& props = schema["properties"];
  for (const auto& [k, v] : doc.items()) {
    ASSERT_TRUE(props.contains(k)) << k;
    if (!v.is_object()) continue;
    std::set<std::string> a, b;
    for (const auto& [kk, vv] : v.items()) a.insert(kk);
    for (const auto& [kk, vv] : props[k]["properties"].items()) b.insert(kk);
    EXPECT_EQ(a, b) << k;
  }
  for (const auto& [k, v] : props.items()) {
    if (k != "$schema") {
      EXPECT_TRUE(doc.contains(k)) << k;
    }
  }
  EXPECT_EQ(config.participants.size(), 3u);
  EXPECT_EQ(config.resolve("x"), (fs::path(WCST_CONFIG_DIR) / "x").string());
}

TEST(PipelineConfig, RateDependentBounds) {
  auto c = PipelineConfig::from_json(minimal_config());
  EXPECT_NO_THROW(c.validate_for_rate(1000));
  EXPECT_THROW(c.validate_for_rate(150), ConfigError);  // 100 Hz band edge above Nyquist
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(SessionService, TrialPayloadHidesRule) {
  auto clock = std::make_shared<ManualClock>();
  SessionService svc({}, clock);
  const auto id = json::parse(svc.create_session("{\"seed\": 3}").body)["session_id"].get<std::string>();
  const auto r = svc.get_trial(id);
  ASSERT_EQ(r.status, 200);
  const auto j = json::parse(r.body);
  for (const auto& [k, v] : j.items()) {
    EXPECT_EQ(k.find("rule"), std::string::npos) << k;
    EXPECT_EQ(k.find("block"), std::string::npos) << k;
    EXPECT_EQ(k.find("streak"), std::string::npos) << k;
    EXPECT_EQ(k.find("schedule"), std::string::npos) << k;
  }
  EXPECT_EQ(j["key_cards"].size(), 4u);
  EXPECT_TRUE(j.contains("stimulus"));
  EXPECT_EQ(j["response_window_s"], 3.0);
  EXPECT_EQ(svc.render_svg(id).content_type, "image/svg+xml");
}

TEST(SessionService, ScoresChoicesAndLogs) {
  auto clock = std::make_shared<ManualClock>();
  SessionService svc({}, clock);
  const auto id = json::parse(svc.create_session("{\"seed\": 11, \"config\": {\"n_blocks\": 2}}").body)["session_id"]
                      .get<std::string>();
  // The payload hides the rule; a twin session with the same seed reveals it
  // through its log after one trial.
  const auto twin = json::parse(svc.create_session("{\"seed\": 11, \"config\": {\"n_blocks\": 2}}").body)["session_id"]
                        .get<std::string>();
  svc.get_trial(twin);
  svc.post_choice(twin, R"({"choice": null})");
  const auto rule = task::TrialLog::from_jsonl(svc.get_log(twin).body).records().at(0).spec.active_rule;

  for (int i = 0; i < 10; ++i) {
    const auto t = json::parse(svc.get_trial(id).body);
    clock->advance(0.8);
    const auto fb = json::parse(svc.post_choice(id, json{{"choice", key_for(t["stimulus"], rule)}}.dump()).body);
    EXPECT_TRUE(fb["correct"].get<bool>());
    EXPECT_FALSE(fb["finished"].get<bool>());
    clock->advance(2.0);
  }
  // The block switch shows only in the exported log.
  const auto next = json::parse(svc.get_trial(id).body);
  EXPECT_EQ(next["trial_index"], 10);
  clock->advance(0.8);
  svc.post_choice(id, R"({"choice": null})");

  const auto log_resp = svc.get_log(id);
  EXPECT_EQ(log_resp.content_type, "application/x-ndjson");
  const auto log = task::TrialLog::from_jsonl(log_resp.body);
  ASSERT_EQ(log.records().size(), 11u);
  for (int i = 0; i < 10; ++i) {
    EXPECT_TRUE(log.records()[i].correct);
    EXPECT_TRUE(log.records()[i].times.ordered());
    EXPECT_EQ(log.records()[i].spec.block_index, 0);
  }
  EXPECT_EQ(log.records()[10].spec.block_index, 1);
  EXPECT_NE(log.records()[10].spec.active_rule, rule);
}

TEST(SessionService, LateChoiceBecomesTimeout) {
  auto clock = std::make_shared<ManualClock>();
  SessionService svc({}, clock);
  const auto id = json::parse(svc.create_session("").body)["session_id"].get<std::string>();
  ASSERT_EQ(svc.get_trial(id).status, 200);
  clock->advance(60.0);
  // The client claims a fast response; the service clock wins.
  const auto fb = json::parse(svc.post_choice(id, R"({"choice": 2, "rt_s": 0.4})").body);
  EXPECT_TRUE(fb["timeout"].get<bool>());
  EXPECT_FALSE(fb["correct"].get<bool>());
  const auto log = task::TrialLog::from_jsonl(svc.get_log(id).body);
  EXPECT_TRUE(log.records()[0].choice.is_timeout());
  EXPECT_FALSE(log.records()[0].rt.has_value());
}

TEST(SessionService, ErrorStatuses) {
  auto clock = std::make_shared<ManualClock>();
  SessionService svc({}, clock);
  EXPECT_EQ(svc.get_trial("s9999").status, 404);
  EXPECT_EQ(svc.get_log("nope").status, 404);
  EXPECT_EQ(svc.create_session("[1]").status, 400);
  EXPECT_EQ(svc.create_session(R"({"config": {"n_blocks": 0}})").status, 400);
  EXPECT_EQ(svc.create_session(R"({"config": {"colour": 1}})").status, 400);
  EXPECT_EQ(svc.create_session(R"({"seed": -1})").status, 400);
  const auto id = json::parse(svc.create_session("{}").body)["session_id"].get<std::string>();
  EXPECT_EQ(svc.post_choice(id, R"({"choice": 1})").status, 409);  // no pending trial
  EXPECT_EQ(svc.render_svg(id).status, 409);
  svc.get_trial(id);
  EXPECT_EQ(svc.post_choice(id, R"({"choice": 5})").status, 400);
  EXPECT_EQ(svc.post_choice(id, R"({"key": 1})").status, 400);
  EXPECT_EQ(svc.post_choice(id, "not json").status, 400);
  EXPECT_EQ(svc.post_choice(id, R"({"choice": null})").status, 200);
}

TEST(SessionService, SessionsAreIndependent) {
  auto clock = std::make_shared<ManualClock>();
  ServiceConfig cfg;
  cfg.base_seed = 5;
  SessionService svc(cfg, clock);
  const auto a = json::parse(svc.create_session("").body)["session_id"].get<std::string>();
  const auto b = json::parse(svc.create_session("").body)["session_id"].get<std::string>();
  EXPECT_NE(a, b);
  EXPECT_EQ(svc.session_ids().size(), 2u);
  svc.get_trial(a);
  svc.post_choice(a, R"({"choice": 1})");
  svc.get_trial(a);
  // b is untouched by a's progress.
  EXPECT_EQ(json::parse(svc.get_trial(b).body)["trial_index"], 0);
  EXPECT_EQ(task::TrialLog::from_jsonl(svc.get_log(b).body).records().size(), 0u);
}

TEST(SessionService, ConcurrentSessions) {
  auto clock = std::make_shared<ManualClock>();
  SessionService svc({}, clock);
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(json::parse(svc.create_session("").body)["session_id"].get<std::string>());
  std::vector<std::thread> threads;
  for (const auto& id : ids) {
    threads.emplace_back([&svc, id] {
      for (int t = 0; t < 50; ++t) {
        svc.get_trial(id);
        svc.post_choice(id, R"({"choice": 3})");
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& id : ids) EXPECT_EQ(task::TrialLog::from_jsonl(svc.get_log(id).body).records().size(), 50u);
}

TEST(HttpServer, OverTheWire) {
  auto clock = std::make_shared<SteadyClock>();
  SessionService svc({}, clock);
  HttpServer server(svc);
  const int port = server.bind(BindAddress::parse("127.0.0.1:0"));
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });

  httplib::Client cli("127.0.0.1", port);
  auto created = cli.Post("/sessions", R"({"seed": 1})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 200);
  const auto id = json::parse(created->body)["session_id"].get<std::string>();
  auto trial = cli.Get("/sessions/" + id + "/trial");
  ASSERT_TRUE(trial);
  EXPECT_EQ(trial->status, 200);
  EXPECT_EQ(json::parse(trial->body)["trial_index"], 0);
  auto svg = cli.Get("/sessions/" + id + "/render.svg");
  ASSERT_TRUE(svg);
  EXPECT_EQ(svg->get_header_value("Content-Type"), "image/svg+xml");
  auto choice = cli.Post("/sessions/" + id + "/choice", R"({"choice": 1})", "application/json");
  ASSERT_TRUE(choice);
  EXPECT_EQ(choice->status, 200);
  EXPECT_TRUE(json::parse(choice->body).contains("correct"));
  auto log = cli.Get("/sessions/" + id + "/log");
  ASSERT_TRUE(log);
  EXPECT_EQ(task::TrialLog::from_jsonl(log->body).records().size(), 1u);
  auto missing = cli.Get("/sessions/zzz/trial");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.stop();
  t.join();
}

TEST(BindAddress, Parse) {
  EXPECT_EQ(BindAddress::parse("0.0.0.0:9000").host, "0.0.0.0");
  EXPECT_EQ(BindAddress::parse(":9001").port, 9001);
  EXPECT_EQ(BindAddress::parse("9002").port, 9002);
  EXPECT_THROW(BindAddress::parse("host:notaport"), ConfigError);
  EXPECT_THROW(BindAddress::parse("host:70000"), ConfigError);
}

TEST(Batch, OracleRandomAndNonConverger) {
  BatchOptions oracle;
  oracle.agent.kind = agents::AgentKind::Oracle;
  oracle.n_sessions = 4;
  const auto o = run_batch(oracle);
  ASSERT_TRUE(o.aggregate);
  EXPECT_DOUBLE_EQ(o.aggregate->acc, 100.0);
  EXPECT_DOUBLE_EQ(o.aggregate->rc, 5.0);
  EXPECT_DOUBLE_EQ(o.aggregate->latency, 0.0);

  BatchOptions random;
  random.agent.kind = agents::AgentKind::Random;
  random.agent.seed = 1;
  random.n_sessions = 20;
  random.session.max_trials = 256;
  const auto r = run_batch(random);
  ASSERT_TRUE(r.aggregate);
  EXPECT_NEAR(r.aggregate->acc, 25.0, 2.0);

  BatchOptions stuck;
  stuck.label = "model";
  stuck.agent.kind = agents::AgentKind::Scripted;
  stuck.agent.script = {task::Choice::key(1)};
  stuck.session.max_trials = 128;
  stuck.n_sessions = 3;
  const auto s = run_batch(stuck);
  ASSERT_TRUE(s.aggregate);
  EXPECT_LT(s.aggregate->acc, 30.0);
  EXPECT_DOUBLE_EQ(s.aggregate->rc, 0.0);
  EXPECT_DOUBLE_EQ(s.aggregate->latency, 128.0);

  const std::vector<BatchResult> all{o, r, s};
  const auto table = batch_report(all);
  EXPECT_EQ(table.to_csv().substr(0, table.to_csv().find('\n')), "label,acc,per,rc,latency");
  const auto csv = sessions_csv(all);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 + 20 + 3);
}

TEST(Batch, AgentFailuresBecomeTimeouts) {
  BatchOptions remote;
  remote.agent.kind = agents::AgentKind::Remote;
  remote.agent.endpoint = "http://127.0.0.1:1/agent";
  remote.agent.remote_timeout_s = 0.5;
  remote.session.n_blocks = 1;
  remote.session.max_trials = 10;
  remote.n_sessions = 2;
  const auto r = run_batch(remote);
  ASSERT_EQ(r.sessions.size(), 2u);
  for (const auto& s : r.sessions) {
    EXPECT_EQ(s.agent_errors, 10);
    EXPECT_FALSE(s.error.empty());
    ASSERT_TRUE(s.log);
    for (const auto& rec : s.log->records()) EXPECT_TRUE(rec.choice.is_timeout());
  }
  ASSERT_TRUE(r.aggregate);
  EXPECT_DOUBLE_EQ(r.aggregate->acc, 0.0);
}

TEST(Batch, EmptyReportRejected) {
  BatchResult empty;
  empty.label = "none";
  const std::vector<BatchResult> only{empty};
  EXPECT_THROW(batch_report(only), EmptyInputError);
  BatchOptions bad;
  bad.n_sessions = 0;
  EXPECT_THROW(run_batch(bad), ConfigError);
}

TEST(Batch, SeedsAreDeterministic) {
  BatchOptions h;
  h.agent.kind = agents::AgentKind::HypothesisTesting;
  h.agent.lapse_rate = 0.1;
  h.n_sessions = 3;
  h.threads = 3;
  const auto a = run_batch(h);
  h.threads = 1;
  const auto b = run_batch(h);
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(a.sessions[i].log && b.sessions[i].log);
    EXPECT_EQ(a.sessions[i].log->to_jsonl(), b.sessions[i].log->to_jsonl());
  }
}

TEST(Pipeline, SmallDatasetIsReproducible) {
  const auto dir = scratch("pipeline");
  DatasetSpec spec;
  spec.n_participants = 3;
  spec.seed = 4;
  spec.fs = 250;
  spec.n_blocks = 2;
  spec.ica_fit_decimation = 2;
  spec.n_permutations = 50;
  const auto ds = write_dataset(spec, dir.string());
  EXPECT_EQ(ds.participant_ids.size(), 3u);

  auto config = PipelineConfig::load(ds.config_path);
  const auto first = run_pipeline(config);
  EXPECT_EQ(first.band_names.front(), "broadband");
  EXPECT_EQ(first.band_names.size(), 6u);
  const auto out = fs::path(config.resolve(config.output_dir));
  std::map<std::string, std::string> snapshot;
  for (const auto& name : first.written) snapshot[name] = read_file(out / name);
  for (const auto* expected : {"clusters.csv", "clusters.json", "erp_waveforms.csv", "topography.json",
                               "provenance.json", "topography_broadband.svg"}) {
    EXPECT_TRUE(snapshot.count(expected)) << expected;
  }
  const auto topo = json::parse(snapshot["topography.json"]);
  int broadband_t = 0;
  for (const auto& w : topo)
    if (w["band"] == "broadband" && w["statistic"] == "t") ++broadband_t;
  EXPECT_EQ(broadband_t, 9);

  const auto second = run_pipeline(config);
  for (const auto& name : second.written) EXPECT_EQ(read_file(out / name), snapshot[name]) << name;
  const auto prov = json::parse(snapshot["provenance.json"]);
  EXPECT_EQ(prov["config_sha256"], sha256_hex(config.to_json().dump()));
}

TEST(Pipeline, FailuresNameTheStage) {
  const auto dir = scratch("stage_error");
  auto j = minimal_config();
  j["output_dir"] = (dir / "out").string();
  const auto config = PipelineConfig::from_json(j, dir.string());
  try {
    run_pipeline(config);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "validate");
    EXPECT_NE(std::string(e.what()).find("a.vhdr"), std::string::npos) << e.what();
  }
}
