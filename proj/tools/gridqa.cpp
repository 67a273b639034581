// gridqa: validate data, ask questions, run sessions, serve HTTP, evaluate.
// Exit codes: 0 success, 1 data/validation failure, 2 usage error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gridqa/corpus.hpp"
#include "gridqa/engine.hpp"
#include "gridqa/error.hpp"
#include "gridqa/server.hpp"
#include "gridqa/session.hpp"

namespace {

using namespace gridqa;

constexpr int kOk = 0;
constexpr int kDataFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EngineOptions engine_options(const std::string& eval_date) {
  EngineOptions o;
  if (!eval_date.empty()) {
    auto d = parse_date(eval_date);
    if (!d) throw UsageError("--eval-date must be YYYY-MM-DD");
    o.evaluation_date = *d;
  }
  return o;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

void print_table(const Engine& engine, const Answer& a, std::ostream& os) {
  const GraphStore& store = engine.store();
  std::vector<std::string> columns{"id"};
  if (const ClassDef* cls = engine.schema().find_class(a.graph.target))
    for (const auto& attr : cls->attributes) columns.push_back(attr.name);
  std::vector<std::vector<std::string>> rows;
  for (VertexIndex v : a.graph.answers) {
    const Vertex& vx = store.vertex(v);
    std::vector<std::string> row{vx.id};
    for (std::size_t c = 1; c < columns.size(); ++c) {
      const Value* val = vx.attr(columns[c]);
      row.push_back(val ? to_string(*val) : "");
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    width[c] = columns[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      os << r[c];
      if (c + 1 < r.size()) os << std::string(width[c] - r[c].size() + 2, ' ');
    }
    os << '\n';
  };
  os << a.graph.target << ": " << a.graph.answers.size()
     << (a.graph.answers.size() == 1 ? " answer" : " answers") << '\n';
  emit(columns);
  for (const auto& r : rows) emit(r);
  if (a.graph.type == QuestionType::Count) os << "count: " << a.graph.answers.size() << '\n';
  std::istringstream lines(a.graph.pseudo_query);
  std::string part, joined;
  while (std::getline(lines, part)) {
    part.erase(0, part.find_first_not_of(' '));
    joined += (joined.empty() ? "" : "; ") + part;
  }
  os << "pseudo-query: " << joined << '\n';
}

int report_error(const Error& e) {
  std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
  switch (e.code()) {
    case ErrorCode::EmptyQuestion: return kUsage;
    default: return kDataFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridqa: question answering over a power-grid knowledge graph"};
  app.require_subcommand(1);

  std::string data_dir = std::getenv("GRIDQA_DATA") ? std::getenv("GRIDQA_DATA") : "";
  std::string eval_date;
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", data_dir, "data directory (schema.json, vertices.jsonl, edges.jsonl, lexicon.json)")
        ->envname("GRIDQA_DATA");
    sub->add_option("--eval-date", eval_date, "reference date for durations without a year (YYYY-MM-DD)")
        ->envname("GRIDQA_EVAL_DATE");
  };

  auto* validate = app.add_subcommand("validate", "load and check data files, print statistics");
  add_data(validate);

  auto* ask = app.add_subcommand("ask", "answer one question");
  add_data(ask);
  std::string question;
  bool as_json = false;
  std::string deps_file;
  ask->add_option("question", question, "question text")->required();
  ask->add_flag("--json", as_json, "print the answer as JSON");
  ask->add_option("--deps-file", deps_file, "CoNLL-U dependency tree to use instead of the built-in parser");

  auto* repl = app.add_subcommand("repl", "interactive session (/anchor ID, /fresh QUESTION, /quit)");
  add_data(repl);

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  add_data(serve);
  ServerConfig server_config;
  std::string static_dir;
  double ttl_minutes = 30;
  serve->add_option("--host", server_config.host, "bind address")->envname("GRIDQA_HOST");
  serve->add_option("--port", server_config.port, "port (0 picks a free one)")->envname("GRIDQA_PORT");
  serve->add_option("--static-dir", static_dir, "directory served under /")->envname("GRIDQA_STATIC_DIR");
  serve->add_option("--session-ttl", ttl_minutes, "idle session expiry in minutes")->envname("GRIDQA_SESSION_TTL");

  auto* eval = app.add_subcommand("eval", "run an evaluation corpus");
  add_data(eval);
  std::string corpus_path, report_path;
  EvalOptions eval_options;
  bool strict = false;
  eval->add_option("--corpus", corpus_path, "corpus file (default: <data>/corpus.json)");
  eval->add_option("--concurrency", eval_options.concurrency, "worker threads")->check(CLI::PositiveNumber);
  eval->add_option("--repeats", eval_options.repeats, "timed runs per case")->check(CLI::PositiveNumber);
  eval->add_option("--report", report_path, "write the JSON report here");
  eval->add_flag("--strict", strict, "exit 1 unless every case is accepted");

  auto* gen = app.add_subcommand("gen", "generate a synthetic graph and corpus");
  GenerateOptions gen_options;
  std::string out_dir;
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--seed", gen_options.seed, "random seed");
  gen->add_option("--vertices", gen_options.vertices, "vertex count");
  gen->add_option("--density", gen_options.density, "optional-edge density in (0, 1]");
  gen->add_option("--cases", gen_options.cases, "corpus size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  auto need_data = [&] {
    if (data_dir.empty()) throw UsageError("--data is required");
  };

  try {
    if (gen->parsed()) {
      write_generated(generate(gen_options), out_dir);
      std::cout << "wrote " << out_dir << " (seed " << gen_options.seed << ", " << gen_options.vertices
                << " vertices, " << gen_options.cases << " cases)\n";
      return kOk;
    }

    // Usage checks that need no data come first.
    if (ask->parsed() && blank(question)) {
      std::cerr << "empty question\n";
      return kUsage;
    }
    need_data();
    EngineOptions options = engine_options(eval_date);
    Engine engine = Engine::open(data_dir, options);

    if (validate->parsed()) {
      std::cout << engine.schema().classes().size() << " classes, " << engine.schema().edge_types().size()
                << " edge types, " << engine.store().vertex_count() << " vertices, "
                << engine.store().edges().size() << " edges, lexicon " << engine.lexicon().size()
                << " entries\n";
      return kOk;
    }

    if (ask->parsed()) {
      std::optional<std::string> deps;
      if (!deps_file.empty()) deps = read_file(deps_file);
      Answer a = engine.ask(question, deps);
      if (as_json) std::cout << a.to_json(engine.store()).dump(2) << '\n';
      else print_table(engine, a, std::cout);
      return kOk;
    }

    if (repl->parsed()) {
      Session session("repl");
      std::string line;
      std::cout << "> " << std::flush;
      while (std::getline(std::cin, line)) {
        try {
          if (line == "/quit" || line == "/exit") break;
          if (line.rfind("/anchor ", 0) == 0) {
            std::string id = line.substr(8);
            session.anchor(engine, id);
            std::cout << "anchored on " << id << '\n';
          } else if (line.rfind("/fresh ", 0) == 0) {
            print_table(engine, session.ask(engine, line.substr(7), AskMode::Fresh), std::cout);
          } else if (!blank(line)) {
            print_table(engine, session.ask(engine, line, AskMode::FollowUp), std::cout);
          }
        } catch (const Error& e) {
          std::cout << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        }
        std::cout << "> " << std::flush;
      }
      return kOk;
    }

    if (serve->parsed()) {
      if (!static_dir.empty()) server_config.static_dir = static_dir;
      if (!(ttl_minutes > 0)) throw UsageError("--session-ttl must be positive");
      server_config.session_ttl =
          std::chrono::milliseconds(static_cast<std::int64_t>(ttl_minutes * 60'000.0));
      Server server(engine, server_config);
      int port = server.bind();
      std::cout << "listening on " << server_config.host << ":" << port << std::endl;
      server.run();
      return kOk;
    }

    if (eval->parsed()) {
      std::string path = corpus_path.empty() ? (std::filesystem::path(data_dir) / "corpus.json").string()
                                             : corpus_path;
      EvalReport report = evaluate(engine, load_corpus(path), eval_options);
      std::cout << report.table();
      for (const auto& c : report.cases)
        if (c.outcome != Outcome::Accepted)
          std::cout << c.id << " " << to_string(c.outcome) << ": " << c.question << " (" << c.message << ")\n";
      if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + report_path);
        out << report.to_json().dump(2) << '\n';
      }
      return strict && report.total.accepted != report.total.quantity ? kDataFailure : kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataFailure;
  }
  return kOk;
}
