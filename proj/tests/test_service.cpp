#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <thread>

#include "dt/search.hpp"
#include "dt/service.hpp"
#include "dt/snapshot.hpp"
#include "http_binding.hpp"

using namespace dt;
using nlohmann::json;

namespace {

struct Fixture {
  TimestampMs t = 1'700'000'000'000;
  std::filesystem::path dir;
  TutorService service;

  explicit Fixture(bool files = false)
      : dir(std::filesystem::temp_directory_path() / "dt_service_test"), service(make_config(files)) {}
  ~Fixture() { std::filesystem::remove_all(dir); }

  ServiceConfig make_config(bool files) {
    std::filesystem::remove_all(dir);
    ServiceConfig c;
    if (files) {
      c.log_dir = dir / "logs";
      c.snapshot_dir = dir / "snapshots";
    }
    c.clock = [this] { return t += 20'000; };
    return c;
  }

  HttpResponse get(const std::string& path) { return service.handle("GET", path, ""); }
  HttpResponse post(const std::string& path, const json& body) { return service.handle("POST", path, body.dump()); }
  HttpResponse act(const std::string& session, const json& body) { return post("/sessions/" + session + "/actions", body); }

  std::string enrol(const std::string& id, std::optional<double> pretest = std::nullopt) {
    REQUIRE(post("/students", {{"id", id}}).status == 201);
    if (pretest) REQUIRE(post("/students/" + id + "/pretest-complete", {{"scores", {*pretest}}}).status == 200);
    return id;
  }

  // Finishes the open problem: worked examples are viewed, backward-only
  // problems follow hints, the rest replay a shortest proof forward.
  json finish(const json& problem) {
    const std::string sid = problem["session"];
    const std::string type = problem["slot"]["type"];
    if (type == "WE" || type == "BWE") return act(sid, {{"kind", "viewed-example"}}).body;
    json last = json::object();
    if (type == "BPS") {
      for (int i = 0; i < 20 && !last.value("complete", false); ++i) {
        auto hint = act(sid, {{"kind", "hint-request"}});
        REQUIRE(hint.status == 200);
        const auto& h = hint.body["hint"];
        REQUIRE(h["direction"] == "backward");
        last = act(sid, {{"kind", "backward"}, {"rule", h["rule"]}, {"target", h["target"]}, {"binding", h["binding"]}})
                   .body;
      }
      return last;
    }
    const auto& spec = ProblemBank::standard().at(problem["slot"]["problem"].get<std::string>());
    auto proof = search_proof(spec);
    REQUIRE(proof.has_value());
    for (const auto& step : *proof) {
      json parents = json::array();
      for (const auto& p : step.premises) parents.push_back(p.text());
      auto r = act(sid, {{"kind", "forward"}, {"rule", step.rule}, {"parents", parents}, {"result", step.conclusion.text()}});
      REQUIRE(r.status == 200);
      last = r.body;
    }
    return last;
  }
};

}  // namespace

TEST_CASE("registration") {
  Fixture f;
  auto r = f.post("/students", json::object());
  CHECK(r.status == 201);
  CHECK(r.body["pretest"] == 4);
  CHECK(f.post("/students", {{"id", "ada"}}).status == 201);
  CHECK(f.post("/students", {{"id", "ada"}}).status == 409);
  CHECK(f.post("/students", {{"id", "../etc"}}).status == 400);
  CHECK(f.service.handle("POST", "/students", "{oops").status == 400);
  CHECK(f.service.handle("POST", "/students", "[1]").status == 400);
  CHECK(f.get("/students/nobody/next-problem").status == 404);
  CHECK(f.get("/nowhere").status == 404);
  CHECK(f.get("/students").status == 404);
}

TEST_CASE("pretest then a treatment sequence") {
  Fixture f(true);
  f.enrol("ada");
  auto first = f.get("/students/ada/next-problem");
  REQUIRE(first.status == 200);
  CHECK(first.body["slot"]["problem"] == "1.1");
  CHECK(first.body["slot"]["pretest"] == true);
  const std::string sid = first.body["session"];

  // Help is off in the pretest; an unfinished problem is resumed.
  CHECK(f.act(sid, {{"kind", "hint-request"}}).status == 403);
  CHECK(f.get("/students/ada/next-problem").body["session"] == sid);
  CHECK(f.post("/students/ada/pretest-complete", json::object()).status == 409);
  CHECK(f.get("/sessions/" + sid + "/playback").status == 409);

  auto failed = f.act(sid, {{"kind", "forward"}, {"rule", "Modus Ponens"}, {"parents", {"A⇒B", "B⇒C"}}});
  CHECK(failed.status == 200);
  CHECK(failed.body["result"]["status"] != "applied");
  auto done = f.finish(first.body);
  CHECK(done["complete"] == true);
  CHECK(done["score"].get<int>() > 0);
  CHECK(done["score"].get<int>() < 100);
  CHECK(f.act(sid, {{"kind", "restart"}}).status == 409);

  // The log on disk replays to the served state.
  auto log = load(f.dir / "logs" / "ada.jsonl");
  auto replayed = replay(ProblemBank::standard().problem_for(ProblemBank::standard().curriculum().pretest_slots()[0]), split_attempts(log)[{"ada", "1.1"}]);
  CHECK(to_json(replayed) == f.get("/sessions/" + sid + "/state").body["state"]);
  CHECK(std::filesystem::exists(f.dir / "snapshots" / (sid + ".json")));

  for (int i = 0; i < 3; ++i) {
    auto next = f.get("/students/ada/next-problem");
    REQUIRE(next.status == 200);
    CHECK(f.finish(next.body)["score"] == 100);
  }
  CHECK(f.get("/students/ada/next-problem").status == 409);
  auto assigned = f.post("/students/ada/pretest-complete", json::object());
  REQUIRE(assigned.status == 200);
  const std::string group = assigned.body["group"];
  CHECK(f.post("/students/ada/pretest-complete", json::object()).status == 409);
  CHECK(f.service.roster().size() == 1);

  auto example = f.get("/students/ada/next-problem");
  CHECK(example.body["slot"]["level"] == 2);
  CHECK(example.body["slot"]["type"] == (group == "C" ? "WE" : "BWE"));
  const std::string eid = example.body["session"];
  auto playback = f.get("/sessions/" + eid + "/playback");
  REQUIRE(playback.status == 200);
  CHECK_FALSE(playback.body["steps"].empty());
  CHECK(f.act(eid, {{"kind", "forward"}, {"rule", "Modus Tollens"}, {"parents", {"Q⇒R", "¬R"}}}).status == 403);

  int solved = 0;
  json next = example.body;
  while (!next.contains("done")) {
    f.finish(next);
    ++solved;
    auto r = f.get("/students/ada/next-problem");
    REQUIRE(r.status == 200);
    next = r.body;
  }
  const auto slots = ProblemBank::standard().curriculum().slots(group_from_string(group));
  const auto examples = std::count_if(slots.begin(), slots.end(), [](const Slot& sl) {
    return sl.type == ProofType::WE || sl.type == ProofType::BWE;
  });
  CHECK(solved == 26);
  CHECK(next["scores"].size() == slots.size() - static_cast<std::size_t>(examples));
}

TEST_CASE("backward-only problems refuse forward steps") {
  Fixture f;
  std::string t2;
  for (int i = 0; i < 6 && t2.empty(); ++i) {
    const std::string id = "s" + std::to_string(i);
    f.enrol(id, 60.0);
    if (f.service.roster().back().group == Group::T2) t2 = id;
  }
  REQUIRE_FALSE(t2.empty());
  f.finish(f.get("/students/" + t2 + "/next-problem").body);
  auto bps = f.get("/students/" + t2 + "/next-problem").body;
  REQUIRE(bps["slot"]["type"] == "BPS");
  const std::string sid = bps["session"];
  auto forged = f.act(sid, {{"kind", "forward"}, {"rule", "Modus Ponens"}, {"parents", {"(A∨B)⇒C", "A"}}});
  CHECK(forged.status == 403);
  CHECK(forged.body.contains("error"));
  CHECK(f.act(sid, {{"kind", "backward"}, {"rule", "Modus Ponens"}, {"target", 99}}).status == 404);
  CHECK(f.act(sid, {{"kind", "backward"}, {"rule", "No Such Rule"}, {"target", "C"}}).status == 404);
  CHECK(f.act(sid, {{"kind", "jump"}}).status == 400);
  CHECK(f.act(sid, {{"rule", "Modus Ponens"}}).status == 400);
  CHECK(f.act(sid, {{"kind", "viewed-example"}}).status == 403);
  CHECK(f.act("s999", {{"kind", "restart"}}).status == 404);
  auto done = f.finish(bps);
  CHECK(done["complete"] == true);
  CHECK(done.contains("score"));
}

TEST_CASE("http binding") {
  TutorService service;
  httplib::Server server;
  bind(server, service);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/students", R"({"id": "bo"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(json::parse(created->body)["id"] == "bo");
  auto next = client.Get("/students/bo/next-problem");
  REQUIRE(next);
  CHECK(next->status == 200);
  CHECK(json::parse(next->body)["slot"]["problem"] == "1.1");
  auto missing = client.Get("/sessions/nope/state");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  worker.join();
}
