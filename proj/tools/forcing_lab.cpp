#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "forcing_lab/forcing_lab.hpp"

namespace fl = forcing_lab;
using fl::json;

namespace {

struct Options {
  std::string poset;
  std::uint64_t seed = 0;
  std::string in, out, format;
  std::size_t precision = 2, depth = 2, search_bound = 0;
  std::string delta = "w^2", mode = "toy";
  std::size_t count = 10, size = 2, steps = 8;
  std::vector<std::size_t> pair{0, 1};
  std::string suite;
};

struct Given {
  CLI::Option *seed, *precision, *depth, *delta, *mode, *search_bound;
};

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw fl::ParseError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw fl::ParseError(path + ": " + e.what());
  }
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw fl::Error("cannot write " + o.out);
  f << text;
}

void emit(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

// Parameters from the document, overridden by flags given on the command line.
fl::PosetHandle handle_for(const Options& o, const Given& g, const json* doc) {
  fl::PosetHandle h;
  if (doc) {
    h.kind = fl::parse_kind(fl::detail::get_field<std::string>(*doc, "kind"));
    if (!o.poset.empty() && fl::parse_kind(o.poset) != h.kind)
      throw fl::BadParams("--poset " + o.poset + " does not match the input kind");
    if (doc->contains("params")) h.params = doc->at("params").get<fl::PosetParams>();
  } else {
    if (o.poset.empty()) throw fl::BadParams("--poset is required");
    h.kind = fl::parse_kind(o.poset);
  }
  if (!doc || g.seed->count()) h.params.seed = o.seed;
  if (!doc || g.precision->count()) h.params.precision = o.precision;
  if (!doc || g.depth->count()) h.params.depth = o.depth;
  if (!doc || g.delta->count()) h.params.delta = o.delta;
  if (!doc || g.mode->count()) h.params.mode = fl::parse_mode(o.mode);
  if (!doc || g.search_bound->count()) h.params.search_bound = o.search_bound;
  return h;
}

std::vector<json> conditions_of(const json& doc) {
  return fl::detail::get_field<std::vector<json>>(doc, "conditions");
}

json doc_header(const fl::Poset& p) {
  return json{{"kind", fl::to_string(p.kind())}, {"params", p.handle().params}};
}

int cmd_gen(const Options& o, const Given& g) {
  const fl::Poset p(handle_for(o, g, nullptr));
  json doc = doc_header(p);
  doc["conditions"] = p.generate(o.count);
  emit(o, doc);
  return 0;
}

int cmd_check(const Options& o, const Given& g) {
  const json doc = read_json(o.in);
  const fl::Poset p(handle_for(o, g, &doc));
  json results = json::array();
  bool all = true;
  const auto cs = conditions_of(doc);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto r = p.check(cs[i]);
    all &= r.ok;
    results.push_back(json{{"index", i}, {"ok", r.ok}, {"reason", r.reason}});
  }
  json out = doc_header(p);
  out["results"] = results;
  out["ok"] = all;
  emit(o, out);
  return all ? 0 : 1;
}

bool wants_dot(const Options& o) {
  if (!o.format.empty()) return o.format == "dot";
  return o.out.size() >= 4 && o.out.compare(o.out.size() - 4, 4, ".dot") == 0;
}

int cmd_compat(const Options& o, const Given& g) {
  const json doc = read_json(o.in);
  const fl::Poset p(handle_for(o, g, &doc));
  const auto graph = fl::compat_graph(p, conditions_of(doc));
  if (wants_dot(o)) emit(o, fl::graph_to_dot(graph));
  else emit(o, fl::graph_to_json(p, graph));
  return 0;
}

int cmd_antichain(const Options& o, const Given& g) {
  const json doc = read_json(o.in);
  const fl::Poset p(handle_for(o, g, &doc));
  const auto cs = conditions_of(doc);
  const auto res = fl::find_antichain(fl::compat_graph(p, cs), o.size);
  json out = doc_header(p);
  out["size"] = o.size;
  out["found"] = res.found;
  out["exhaustive"] = res.exhaustive;
  out["vertices"] = res.vertices;
  json members = json::array();
  for (auto v : res.vertices) members.push_back(cs[v]);
  out["conditions"] = members;
  emit(o, out);
  return 0;
}

int cmd_amalgamate(const Options& o, const Given& g) {
  const json doc = read_json(o.in);
  const fl::Poset p(handle_for(o, g, &doc));
  const auto cs = conditions_of(doc);
  if (o.pair.size() != 2 || o.pair[0] >= cs.size() || o.pair[1] >= cs.size())
    throw fl::BadParams("--pair needs two indices into the input conditions");
  const json& a = cs[o.pair[0]];
  const json& b = cs[o.pair[1]];
  const auto r = p.compat(a, b);
  json out = doc_header(p);
  out["pair"] = o.pair;
  out["status"] = fl::to_string(r.status);
  out["note"] = r.note;
  out["witness"] = r.witness;
  if (r.status == fl::Compat::Compatible) {
    const auto why = p.replay(a, b, r.witness);
    out["replay"] = why ? *why : "ok";
  }
  emit(o, out);
  return 0;
}

int cmd_decompose(const Options& o, const Given& g) {
  const json doc = read_json(o.in);
  const fl::Poset p(handle_for(o, g, &doc));
  json cells = json::array();
  for (const auto& c : p.decompose(conditions_of(doc)))
    cells.push_back(json{{"key", c.key}, {"members", c.members}, {"bound", c.bound}});
  json out = doc_header(p);
  out["cells"] = cells;
  emit(o, out);
  return 0;
}

int cmd_generic(Options o, const Given& g) {
  if (o.poset.empty()) o.poset = "knaster";
  const fl::PosetHandle h = handle_for(o, g, nullptr);
  if (h.kind != fl::PosetKind::Knaster) throw fl::BadParams("generic runs need --poset knaster");
  if (o.steps > fl::kGenericMaxSteps) throw fl::BadParams("--steps above " + std::to_string(fl::kGenericMaxSteps));
  const fl::Poset p(h);
  std::mt19937_64 rng(fl::detail::splitmix64(h.params.seed ^ 0x5851f42d4c957f2dULL));
  std::vector<fl::GenericAction> actions;
  json acts = json::array();
  for (std::size_t k = 0; k < o.steps; ++k) {
    const auto r = rng() % 3;
    const fl::Nat alpha = rng() % 4, beta = 4 + k;
    if (r == 0) {
      actions.emplace_back(fl::ExtendAction{});
      acts.push_back(json{{"action", "extend"}});
    } else if (r == 1) {
      actions.emplace_back(fl::CopyAction{alpha, beta});
      acts.push_back(json{{"action", "copy"}, {"alpha", alpha}, {"beta", beta}});
    } else {
      actions.emplace_back(fl::LinkAction{alpha, beta});
      acts.push_back(json{{"action", "link"}, {"alpha", alpha}, {"beta", beta}});
    }
  }
  const fl::QCondition seed({{0, fl::FinSeq{}}}, 0);
  const auto run = fl::mini_generic(p.family(), seed, actions, o.steps);
  json links = json::array();
  for (const auto& l : run.links) links.push_back(json{{"alpha", l.alpha}, {"beta", l.beta}, {"index", l.index}});
  json out = doc_header(p);
  out["steps"] = o.steps;
  out["actions"] = acts;
  out["condition"] = run.condition;
  out["links"] = links;
  out["fallbacks"] = run.fallbacks;
  out["family"] = fl::family_to_json(run.family);
  emit(o, out);
  return 0;
}

int cmd_verify(const Options& o, const Given& g) {
  if (!o.in.empty()) {
    // Replays every edge witness of a graph written by `compat`.
    const json doc = read_json(o.in);
    const fl::Poset p(handle_for(o, g, &doc));
    fl::CompatGraph graph;
    graph.vertices = fl::detail::get_field<std::vector<json>>(doc, "vertices");
    for (const auto& e : fl::detail::field(doc, "edges"))
      graph.edges.push_back({e.at("u").get<std::size_t>(), e.at("v").get<std::size_t>(), e.at("witness")});
    const auto why = fl::verify_graph(p, graph);
    emit(o, why ? "FAIL witness " + *why + "\n"
                : "PASS " + std::to_string(graph.edges.size()) + " edge witnesses replay\n");
    return why ? 1 : 0;
  }
  if (o.suite.empty()) throw fl::UnknownSuite("no suite given");
  const auto rep = fl::run_suite(o.suite);
  emit(o, rep.to_text());
  return rep.ok() ? 0 : 1;
}

std::string footer() {
  std::ostringstream os;
  os << "Poset kinds:";
  for (const auto& [_, name] : fl::kind_names()) os << " " << name;
  os << "\nSuites:";
  for (const auto& s : fl::suite_names()) os << " " << s;
  os << "\n\nFixed thresholds:\n"
     << "  antichain search is exhaustive up to " << fl::kExhaustiveAntichainLimit
     << " vertices, greedy beyond\n"
     << "  knaster and p1 use the base family after " << fl::kFamilySteps << " schedule entries\n"
     << "  generators try " << fl::kGenAttempts << " samples per condition\n"
     << "  b-homogeneous partitions are exact up to " << fl::kExactPartitionLimit << " branches\n"
     << "  generic runs take at most " << fl::kGenericMaxSteps << " steps\n"
     << "  knaster pairs that are not aligned are undecided unless --search-bound > 0\n"
     << "\nFORCING_LAB_SEED supplies the default seed; --config reads key=value lines.\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite forcing posets: generation, checking, compatibility and property suites"};
  app.footer(footer());
  app.set_config("--config", "", "key=value file; flags override it");
  app.require_subcommand(1);

  Options o;
  Given g{};
  app.add_option("--poset", o.poset, "poset kind");
  g.seed = app.add_option("--seed", o.seed, "seed")->envname("FORCING_LAB_SEED");
  app.add_option("--in", o.in, "input JSON document");
  app.add_option("--out", o.out, "output file (.json or .dot); stdout when absent");
  app.add_option("--format", o.format, "force output format for compat: json or dot");
  g.precision = app.add_option("--precision", o.precision, "p1 precision");
  g.depth = app.add_option("--depth", o.depth, "level / tree depth");
  g.delta = app.add_option("--delta", o.delta, "indecomposable ordinal bound for qstar, in CNF");
  g.mode = app.add_option("--mode", o.mode, "tree parameters: exact or toy");
  g.search_bound = app.add_option("--search-bound", o.search_bound, "knaster bounded search steps");
  app.add_option("--count", o.count, "number of conditions to generate");
  app.add_option("--size", o.size, "antichain size");
  app.add_option("--pair", o.pair, "two condition indices")->expected(2);
  app.add_option("--steps", o.steps, "mini-generic rounds");
  app.add_option("--suite", o.suite, "property suite for verify");

  int rc = 0;
  auto sub = [&](const char* name, const char* desc, auto fn) {
    auto* s = app.add_subcommand(name, desc)->fallthrough();
    s->callback([&, fn] { rc = fn(o, g); });
    return s;
  };
  sub("gen", "generate conditions", cmd_gen);
  sub("check", "check every condition of --in", cmd_check);
  sub("compat", "compatibility graph with witnesses", cmd_compat);
  sub("antichain", "pairwise incompatible subset of --size", cmd_antichain);
  sub("amalgamate", "common extension of --pair", cmd_amalgamate);
  sub("decompose", "cells of p3, p4 or hechler conditions", cmd_decompose);
  sub("generic", "mini-generic run on the knaster poset", cmd_generic);
  auto* verify = sub("verify", "run a property suite, or replay a graph given by --in", cmd_verify);
  verify->add_option("suite", o.suite, "suite name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const fl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
