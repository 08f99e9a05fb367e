#include <doctest.h>

#include <algorithm>
#include <set>

#include "dt/approach_map.hpp"
#include "dt/compare.hpp"
#include "dt/network.hpp"
#include "dt/problems.hpp"
#include "dt/replay.hpp"

using dt::parse;
namespace mn = dt::mining;

namespace {

constexpr dt::TimestampMs kSec = 1000;

const dt::ProblemSpec& bank(const char* id) { return dt::ProblemBank::standard().at(id); }

struct Script {
  dt::AttemptRecorder rec;
  dt::TimestampMs t;
  Script(const std::string& student, dt::Group g, const dt::ProblemSpec& p, dt::TimestampMs start = 0)
      : rec(student, g, p, start), t(start) {}

  Script& fwd(const char* rule, std::initializer_list<const char*> parents, dt::TimestampMs after,
              const char* result = nullptr) {
    std::vector<dt::NodeId> ids;
    for (auto p : parents) ids.push_back(*rec.state().find(parse(p)));
    dt::ForwardChoice c;
    if (result) c.result = parse(result);
    rec.forward(dt::RuleCatalog::standard().at(rule), ids, c, t += after);
    return *this;
  }
};

void append(std::vector<dt::InteractionEvent>& out, const Script& s) {
  out.insert(out.end(), s.rec.events().begin(), s.rec.events().end());
}

// Canonical order is formula order, rendered with minimal parentheses.
std::vector<std::string> sorted_texts(const std::vector<const char*>& xs) {
  std::vector<dt::Formula> fs;
  for (auto x : xs) fs.push_back(parse(x));
  std::sort(fs.begin(), fs.end());
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.text());
  return out;
}

// 2.4 solved along Simp, DS, MP, HS.
Script solve_2_4(const std::string& student, dt::Group g, dt::TimestampMs first, dt::TimestampMs rest = 30 * kSec) {
  Script s(student, g, bank("2.4"));
  s.fwd("Simplification", {"D∧¬(A⇒¬C)"}, first, "¬(A⇒¬C)")
      .fwd("Disjunctive Syllogism", {"B∨(A⇒¬C)", "¬(A⇒¬C)"}, rest)
      .fwd("Modus Ponens", {"B", "B⇒(A⇒J)"}, rest)
      .fwd("Hypothetical Syllogism", {"A⇒J", "J⇒¬C"}, rest);
  return s;
}

}  // namespace

TEST_CASE("state keys") {
  auto s = dt::new_state(bank("5.4"));
  auto key = mn::state_key(s);
  CHECK(key == sorted_texts({"¬(K∧M)", "J⇒(K∧L)", "L⇒M"}));
  CHECK(mn::key_text(key) == "{" + key[0] + ", " + key[1] + ", " + key[2] + "}");
  CHECK(std::find(key.begin(), key.end(), "¬J") == key.end());
}

TEST_CASE("a single DeMorgan step") {
  Script s("S001", dt::Group::C, bank("5.4"));
  s.fwd("DeMorgan", {"¬(K∧M)"}, 20 * kSec);
  auto net = mn::build_network(s.rec.events(), bank("5.4"));
  REQUIRE(net.nodes.size() == 2);
  REQUIRE(net.edges.size() == 1);
  const auto& e = net.edges[0];
  CHECK(e.from == net.start);
  CHECK(e.action == "DeM(¬(K∧M))");
  CHECK(e.frequency == mn::GroupCounts{1, 0, 0});
  CHECK(net.nodes[e.to].key == sorted_texts({"¬(K∧M)", "J⇒(K∧L)", "L⇒M", "¬K∨¬M"}));
  CHECK(e.seconds_before == std::vector<double>{20});
  REQUIRE(net.traces.size() == 1);
  CHECK_FALSE(net.traces[0].complete);
  REQUIRE(net.traces[0].derivations.size() == 1);
  CHECK(net.traces[0].derivations[0].formula == "¬K∨¬M");
}

TEST_CASE("a failed application is a self-loop") {
  Script s("S001", dt::Group::T1, bank("5.4"));
  s.fwd("Modus Ponens", {"L⇒M", "¬(K∧M)"}, 5 * kSec);
  auto net = mn::build_network(s.rec.events(), bank("5.4"));
  REQUIRE(net.edges.size() == 1);
  CHECK(net.edges[0].from == net.edges[0].to);
  CHECK(net.edges[0].frequency == mn::GroupCounts{0, 1, 0});
}

TEST_CASE("identical traces add up") {
  std::vector<dt::InteractionEvent> one, two;
  append(one, solve_2_4("S001", dt::Group::T2, 40 * kSec));
  two = one;
  append(two, solve_2_4("S002", dt::Group::T2, 40 * kSec));
  auto a = mn::build_network(one, bank("2.4"));
  auto b = mn::build_network(two, bank("2.4"));
  REQUIRE(a.nodes.size() == b.nodes.size());
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    CHECK(a.edges[i].action == b.edges[i].action);
    CHECK(b.edges[i].frequency[2] == 2 * a.edges[i].frequency[2]);
  }
  CHECK(b.traces.size() == 2);
  CHECK(b.traces[0].complete);
  auto expected = sorted_texts({"B∨(A⇒¬C)", "B⇒(A⇒J)", "D∧¬(A⇒¬C)", "J⇒¬C", "¬(A⇒¬C)", "B", "A⇒J", "A⇒¬C"});
  auto got = b.contributing_union();
  CHECK(std::set<std::string>(got.begin(), got.end()) == std::set<std::string>(expected.begin(), expected.end()));
  CHECK(mn::InteractionNetwork::from_json(b.to_json()) == b);
}

TEST_CASE("network input checks") {
  Script s("S001", dt::Group::C, bank("2.4"));
  CHECK_THROWS_AS(mn::build_network(s.rec.events(), bank("5.4")), std::invalid_argument);
  auto we = bank("2.4");
  we.type = dt::ProofType::WE;
  dt::AttemptRecorder viewer("S002", dt::Group::C, we, 0);
  viewer.viewed_example(9000);
  auto net = mn::build_network(viewer.events(), bank("2.4"));
  CHECK(net.traces.empty());
  CHECK(net.nodes.size() == 1);
}

TEST_CASE("approach map for a common three-region path") {
  std::vector<dt::InteractionEvent> events;
  for (int i = 0; i < 6; ++i)
    append(events, solve_2_4("S" + std::to_string(100 + i), dt::kGroups[static_cast<std::size_t>(i % 3)], 30 * kSec));
  auto net = mn::build_network(events, bank("2.4"));

  const auto s1 = net.find(sorted_texts({"B∨(A⇒¬C)", "B⇒(A⇒J)", "D∧¬(A⇒¬C)", "J⇒¬C", "¬(A⇒¬C)"}));
  REQUIRE(s1.has_value());
  mn::Clustering c;
  c.region.assign(net.nodes.size(), mn::kNoRegion);
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (net.nodes[i].start || net.nodes[i].goal) continue;
    c.region[i] = i == *s1 ? 0 : 1;
  }
  c.region_count = 2;

  auto map = mn::build_approach_map(net, c);
  REQUIRE(map.approaches.size() == 1);
  CHECK(map.approaches[0].path == std::vector<std::string>{"Start", "R1", "R2", "Goal"});
  CHECK(map.approaches[0].frequency == mn::GroupCounts{2, 2, 2});
  const auto* r1 = map.region("R1");
  const auto* r2 = map.region("R2");
  REQUIRE(r1);
  REQUIRE(r2);
  CHECK(r1->label == std::vector<std::string>{"¬(A⇒¬C)"});
  CHECK(std::find(r2->label.begin(), r2->label.end(), "B") != r2->label.end());
  CHECK(std::find(r2->label.begin(), r2->label.end(), "A⇒J") != r2->label.end());

  auto dot = mn::to_dot(map);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("[2, 2, 2]") != std::string::npos);
  CHECK(mn::ApproachMap::from_json(map.to_json()) == map);
  CHECK(mn::ApproachMap::from_json(nlohmann::json::parse(map.to_json().dump())) == map);
}

TEST_CASE("one linear trace gives one region and one approach") {
  auto net = mn::build_network(solve_2_4("S001", dt::Group::C, 30 * kSec).rec.events(), bank("2.4"));
  auto c = mn::cluster_network(net);
  CHECK(c.region_count == 1);
  auto map = mn::build_approach_map(net, c);
  CHECK(map.regions.size() == 1);
  REQUIRE(map.approaches.size() == 1);
  CHECK(map.approaches[0].path == std::vector<std::string>{"Start", "R1", "Goal"});
}

TEST_CASE("two scripted strategies give two approaches") {
  // 2.1: ¬Q then ¬P by Modus Tollens twice, or P⇒R by Hypothetical Syllogism then ¬P.
  std::vector<dt::InteractionEvent> events;
  for (int i = 0; i < 5; ++i) {
    Script a("A" + std::to_string(i), dt::Group::C, bank("2.1"));
    a.fwd("Modus Tollens", {"Q⇒R", "¬R"}, 30 * kSec).fwd("Modus Tollens", {"P⇒Q", "¬Q"}, 30 * kSec);
    append(events, a);
    Script b("B" + std::to_string(i), dt::Group::T1, bank("2.1"));
    b.fwd("Hypothetical Syllogism", {"P⇒Q", "Q⇒R"}, 30 * kSec).fwd("Modus Tollens", {"P⇒R", "¬R"}, 30 * kSec);
    append(events, b);
  }
  auto net = mn::build_network(events, bank("2.1"));
  auto map = mn::build_approach_map(net, mn::cluster_network(net));
  REQUIRE(map.approaches.size() == 2);
  std::set<mn::GroupCounts> freqs{map.approaches[0].frequency, map.approaches[1].frequency};
  CHECK(freqs == std::set<mn::GroupCounts>{{5, 0, 0}, {0, 5, 0}});
  for (const auto& a : map.approaches) CHECK(a.path.size() == 3);
}

TEST_CASE("map export edge cases") {
  CHECK(mn::to_dot(mn::ApproachMap{}) == "digraph approach_map {\n}\n");
  CHECK(mn::ApproachMap::from_json(mn::ApproachMap{}.to_json()) == mn::ApproachMap{});
  Script s("S001", dt::Group::C, bank("2.4"));
  s.fwd("Simplification", {"D∧¬(A⇒¬C)"}, kSec, "D");
  auto net = mn::build_network(s.rec.events(), bank("2.4"));
  CHECK_THROWS_AS(mn::build_approach_map(net, mn::cluster_network(net)), std::invalid_argument);
  CHECK(mn::to_dot(net).rfind("digraph", 0) == 0);
}

TEST_CASE("group comparison on a proposition") {
  std::vector<dt::InteractionEvent> events;
  for (int i = 0; i < 10; ++i) {
    const dt::TimestampMs base = (60 + 5 * i) * kSec;
    append(events, solve_2_4("C" + std::to_string(i), dt::Group::C, 2 * base));
    append(events, solve_2_4("T" + std::to_string(i), dt::Group::T1, base));
    Script s("U" + std::to_string(i), dt::Group::T2, bank("2.4"));
    s.fwd("Simplification", {"D∧¬(A⇒¬C)"}, base / 2, "D").fwd("Material Implication", {"J⇒¬C"}, base / 2);
    s.fwd("Simplification", {"D∧¬(A⇒¬C)"}, 0, "¬(A⇒¬C)")
        .fwd("Disjunctive Syllogism", {"B∨(A⇒¬C)", "¬(A⇒¬C)"}, 30 * kSec)
        .fwd("Modus Ponens", {"B", "B⇒(A⇒J)"}, 30 * kSec)
        .fwd("Hypothetical Syllogism", {"A⇒J", "J⇒¬C"}, 30 * kSec);
    append(events, s);
  }
  auto net = mn::build_network(events, bank("2.4"));
  const auto target = parse("¬(A⇒¬C)");

  auto time = mn::annotation_samples(net, target, mn::AnnotationMetric::TimeToDerive);
  for (std::size_t i = 0; i < 10; ++i) CHECK(time[0][i] == doctest::Approx(2 * time[1][i]));
  auto reports = mn::compare_on_annotation(net, target, mn::AnnotationMetric::TimeToDerive);
  REQUIRE(reports.size() == 4);
  CHECK(reports[1].label == "T1<C");
  CHECK(reports[1].decision);
  CHECK(reports[1].p_value < 0.016);
  CHECK(reports[2].decision);
  CHECK_FALSE(reports[3].decision);

  auto unnecessary = mn::annotation_samples(net, target, mn::AnnotationMetric::UnnecessaryCount);
  CHECK(unnecessary[0] == std::vector<double>(10, 0.0));
  CHECK(unnecessary[2] == std::vector<double>(10, 2.0));
  auto steps = mn::annotation_samples(net, parse("B"), mn::AnnotationMetric::StepsBefore);
  CHECK(steps[1] == std::vector<double>(10, 1.0));
  CHECK(steps[2] == std::vector<double>(10, 3.0));

  auto same = mn::compare_on_annotation(net, parse("A⇒J"), mn::AnnotationMetric::UnnecessaryCount);
  CHECK_FALSE(same[1].decision);
  CHECK(same[2].decision);

  CHECK_THROWS_AS(mn::compare_on_annotation(net, parse("Z"), mn::AnnotationMetric::TimeToDerive), std::invalid_argument);
  CHECK(mn::annotation_metric_from_string("time") == mn::AnnotationMetric::TimeToDerive);
  CHECK(mn::annotation_metric_from_string("steps-before") == mn::AnnotationMetric::StepsBefore);
  CHECK_THROWS(mn::annotation_metric_from_string("speed"));
}

TEST_CASE("equal samples raise no flags") {
  std::vector<dt::InteractionEvent> events;
  for (int i = 0; i < 6; ++i)
    for (auto g : dt::kGroups)
      append(events, solve_2_4(dt::to_string(g) + std::to_string(i), g, (30 + 10 * i) * kSec));
  auto net = mn::build_network(events, bank("2.4"));
  for (const auto& r : mn::compare_on_annotation(net, parse("B"), mn::AnnotationMetric::TimeToDerive))
    CHECK_FALSE(r.decision);
}
