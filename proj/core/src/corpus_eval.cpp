#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "gridqa/corpus.hpp"
#include "gridqa/error.hpp"
#include "gridqa/session.hpp"

namespace gridqa {

using nlohmann::json;

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Accepted: return "accepted";
    case Outcome::ParsingError: return "parsing_error";
    case Outcome::ReasoningError: return "reasoning_error";
    case Outcome::WrongAnswer: return "wrong_answer";
    case Outcome::LabelMismatch: return "label_mismatch";
  }
  return "wrong_answer";
}

namespace {

Answer run_case(const Engine& engine, const EvalCase& c, double& elapsed_ms) {
  using clock = std::chrono::steady_clock;
  if (!c.follow_up()) {
    auto start = clock::now();
    Answer a = engine.ask(c.question, c.deps);
    elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    return a;
  }
  Session s(c.id);
  for (const auto& q : c.previous) s.ask(engine, q, AskMode::Fresh);
  auto start = clock::now();
  Answer a = s.ask(engine, c.question, AskMode::FollowUp, c.deps);
  elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  return a;
}

CaseResult evaluate_case(const Engine& engine, const EvalCase& c, std::size_t repeats) {
  CaseResult r;
  r.id = c.id;
  r.question = c.question;
  r.multi_hop = c.multi_hop;
  r.multi_condition = c.multi_condition;
  double total = 0;
  std::size_t runs = std::max<std::size_t>(repeats, 1);
  try {
    std::optional<Answer> first;
    for (std::size_t i = 0; i < runs; ++i) {
      double ms = 0;
      Answer a = run_case(engine, c, ms);
      total += ms;
      if (!first) first = std::move(a);
    }
    r.elapsed_ms = total / static_cast<double>(runs);
    r.answers = first->graph.answer_ids(engine.store());
    std::sort(r.answers.begin(), r.answers.end());
    r.measured_hops = first->plan.route.size();
    r.measured_conditions = first->parsed.constraints.size();
    if (c.expected_error) {
      r.outcome = Outcome::WrongAnswer;
      r.message = "expected " + *c.expected_error;
    } else if (r.answers != *c.expected) {
      r.outcome = Outcome::WrongAnswer;
      r.message = "answer set differs from expected";
    } else if ((*r.measured_hops > 1) != c.multi_hop || (*r.measured_conditions > 1) != c.multi_condition) {
      r.outcome = Outcome::LabelMismatch;
      r.message = "declared category disagrees with the compiled plan";
    } else {
      r.outcome = Outcome::Accepted;
    }
  } catch (const Error& e) {
    r.error = std::string(to_string(e.code()));
    r.message = e.what();
    if (c.expected_error && *c.expected_error == *r.error) r.outcome = Outcome::Accepted;
    else if (e.stage() == ErrorStage::Parsing) r.outcome = Outcome::ParsingError;
    else if (e.stage() == ErrorStage::Reasoning) r.outcome = Outcome::ReasoningError;
    else r.outcome = Outcome::WrongAnswer;
  }
  return r;
}

void tally(CategoryRow& row, const CaseResult& r) {
  ++row.quantity;
  row.total_ms += r.elapsed_ms;
  switch (r.outcome) {
    case Outcome::Accepted: ++row.accepted; break;
    case Outcome::ParsingError: ++row.parsing_errors; break;
    case Outcome::ReasoningError: ++row.reasoning_errors; break;
    default: ++row.other; break;
  }
}

json row_json(const CategoryRow& row) {
  return {{"quantity", row.quantity},         {"parsing_errors", row.parsing_errors},
          {"reasoning_errors", row.reasoning_errors}, {"accepted", row.accepted},
          {"other_rejections", row.other},    {"accepted_rate", row.accepted_rate()},
          {"average_ms", row.average_ms()}};
}

}  // namespace

EvalReport evaluate(const Engine& engine, const std::vector<EvalCase>& cases, EvalOptions options) {
  EvalReport report;
  report.cases.resize(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++)
      report.cases[i] = evaluate_case(engine, cases[i], options.repeats);
  };
  std::size_t threads = std::clamp<std::size_t>(options.concurrency, 1, std::max<std::size_t>(cases.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& r : report.cases) {
    tally(r.multi_hop ? report.multi_hop : report.single_hop, r);
    tally(r.multi_condition ? report.multi_condition : report.single_condition, r);
    tally(report.total, r);
  }
  return report;
}

std::string EvalReport::table() const {
  const CategoryRow* rows[] = {&single_hop, &multi_hop, &single_condition, &multi_condition, &total};
  const char* heads[] = {"Single-hop", "Multi-hop", "Single-condition", "Multi-condition", "Total"};
  std::string out;
  char buf[64];
  auto line = [&](const char* label, auto&& cell) {
    std::snprintf(buf, sizeof buf, "%-22s", label);
    out += buf;
    for (const CategoryRow* r : rows) {
      std::snprintf(buf, sizeof buf, " %17s", cell(*r).c_str());
      out += buf;
    }
    out += '\n';
  };
  std::snprintf(buf, sizeof buf, "%-22s", "Category");
  out += buf;
  for (const char* h : heads) {
    std::snprintf(buf, sizeof buf, " %17s", h);
    out += buf;
  }
  out += '\n';
  auto count = [](std::size_t n) { return std::to_string(n); };
  line("Quantity", [&](const CategoryRow& r) { return count(r.quantity); });
  line("Parsing Error", [&](const CategoryRow& r) { return count(r.parsing_errors); });
  line("Reasoning Error", [&](const CategoryRow& r) { return count(r.reasoning_errors); });
  line("Accepted Answers", [&](const CategoryRow& r) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f%%", 100.0 * r.accepted_rate());
    return std::string(b);
  });
  line("Average Execution Time", [&](const CategoryRow& r) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3fms", r.average_ms());
    return std::string(b);
  });
  return out;
}

json EvalReport::to_json() const {
  json j;
  j["categories"] = {{"single_hop", row_json(single_hop)},
                     {"multi_hop", row_json(multi_hop)},
                     {"single_condition", row_json(single_condition)},
                     {"multi_condition", row_json(multi_condition)},
                     {"total", row_json(total)}};
  j["cases"] = json::array();
  for (const auto& r : cases) {
    json c{{"id", r.id},
           {"question", r.question},
           {"hop", r.multi_hop ? "multi" : "single"},
           {"condition", r.multi_condition ? "multi" : "single"},
           {"outcome", to_string(r.outcome)},
           {"answers", r.answers.size()},
           {"elapsed_ms", r.elapsed_ms}};
    if (r.measured_hops) c["measured_hops"] = *r.measured_hops;
    if (r.measured_conditions) c["measured_conditions"] = *r.measured_conditions;
    if (r.error) c["error"] = *r.error;
    if (!r.message.empty()) c["message"] = r.message;
    j["cases"].push_back(std::move(c));
  }
  return j;
}

}  // namespace gridqa
