// topab: verify, search, extend, dual, sections, report.
//
// Exit codes: 0 pass, 1 conclusion failures (verify), 2 usage or malformed
// input, 3 non-topologizing section (extend).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "topab/topab.hpp"

namespace {

using topab::json::json;
namespace tj = topab::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw topab::Error(topab::ErrorKind::MalformedInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) { return tj::parse(read_file(path)); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw topab::Error(topab::ErrorKind::MalformedInput, "cannot write " + path);
  out << text;
}

/// "--out run" and "--out run.jsonl" both give run.jsonl and run.md.
std::string out_stem(const std::string& out) {
  for (const char* ext : {".jsonl", ".md", ".json"}) {
    const std::string e(ext);
    if (out.size() > e.size() && out.compare(out.size() - e.size(), e.size(), e) == 0)
      return out.substr(0, out.size() - e.size());
  }
  return out;
}

struct SweepArgs {
  std::string theorem;
  std::string task_file;
  std::string out;
  std::string instance;
  long long max_order = -1;
  long long seed = -1;
  std::vector<std::string> drop;
  bool stop_at_first = false;
  long long max_witnesses = -1;
};

topab::SearchTask make_task(const SweepArgs& a) {
  topab::SearchTask t;
  if (!a.task_file.empty()) t = tj::task_from_json(read_json(a.task_file));
  if (!a.theorem.empty()) t.theorem = a.theorem;
  if (t.theorem.empty()) throw topab::Error(topab::ErrorKind::MalformedInput, "no theorem given");
  if (a.max_order >= 0) t.family.max_group_order = a.max_order;
  if (a.seed >= 0) t.family.seed = static_cast<std::uint64_t>(a.seed);
  for (const auto& d : a.drop) t.dropped.push_back(d);
  if (a.stop_at_first) t.stop_at_first = true;
  if (a.max_witnesses >= 0) t.max_witnesses = static_cast<std::size_t>(a.max_witnesses);
  return t;
}

int run_sweep(const SweepArgs& a, const std::string& mode) {
  if (!a.instance.empty()) {
    const topab::Diagram d = tj::diagram_from_json(read_json(a.instance));
    const topab::VerificationReport r = topab::verify(a.theorem, d, a.drop);
    const std::string text = tj::report_to_json(r).dump(2) + "\n";
    if (!a.out.empty()) write_file(out_stem(a.out) + ".json", text);
    std::cout << text;
    return r.verdict.failure() ? 1 : 0;
  }
  const topab::SearchTask task = make_task(a);
  const topab::SearchResult r = topab::run_search(task);
  std::ostringstream jsonl;
  tj::write_jsonl(jsonl, r, mode);
  const std::string md = tj::render_markdown(r, mode);
  if (!a.out.empty()) {
    const std::string stem = out_stem(a.out);
    write_file(stem + ".jsonl", jsonl.str());
    write_file(stem + ".md", md);
  }
  std::cout << md;
  if (mode == "verify") return r.summary.counts.conclusion_failures ? 1 : 0;
  return 0;
}

void add_sweep_options(CLI::App* cmd, SweepArgs& a, bool search) {
  cmd->add_option("theorem", a.theorem, "theorem id");
  cmd->add_option("--max-order", a.max_order, "largest group order in the family")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a.out, "write <out>.jsonl and <out>.md");
  cmd->add_option("--seed", a.seed, "family seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--drop", a.drop, "hypothesis to drop (repeatable)");
  cmd->add_option("--task", a.task_file, "task file (JSON)");
  if (search) {
    cmd->add_flag("--stop-at-first", a.stop_at_first, "stop at the first conclusion failure");
    cmd->add_option("--max-witnesses", a.max_witnesses, "witnesses to keep")->check(CLI::NonNegativeNumber);
  } else {
    cmd->add_option("--instance", a.instance, "verify one diagram (JSON) instead of sweeping");
  }
}

json pair_coords(const topab::TwistedGroup& t, topab::Index x) {
  return json::array({tj::element_to_json(t.A(), t.a_of(x)), tj::element_to_json(t.B(), t.b_of(x))});
}

/// Cocycle files may omit "A" and "B"; the group files supply them.
topab::FactorSet read_cocycle(const json& j, const topab::FinAbGroup& A, const topab::FinAbGroup& B) {
  json full = j;
  if (!full.is_object()) throw topab::Error(topab::ErrorKind::MalformedInput, "cocycle must be an object");
  if (!full.contains("A")) full["A"] = tj::group_to_json(A);
  if (!full.contains("B")) full["B"] = tj::group_to_json(B);
  topab::FactorSet h = tj::cocycle_from_json(full);
  if (!(h.A == A) || !(h.B == B))
    throw topab::Error(topab::ErrorKind::MalformedInput, "cocycle groups differ from the group files");
  const auto check = topab::validate_cocycle(h);
  if (!check) throw topab::Error(topab::ErrorKind::MalformedInput, "not a normalized symmetric cocycle: " + check.reason);
  return h;
}

int cmd_extend(const std::string& a_path, const std::string& b_path, const std::string& h_path,
               const std::string& s_path) {
  const topab::TopAbGroup A = tj::topgroup_from_json(read_json(a_path));
  const topab::TopAbGroup B = tj::topgroup_from_json(read_json(b_path));
  const topab::FactorSet h = read_cocycle(read_json(h_path), A.group(), B.group());
  const topab::Realization r = topab::realize(h);
  const topab::TwistedGroup& t = r.twisted;
  topab::Section s = r.section;
  if (!s_path.empty()) {
    std::vector<topab::Int> moduli = A.group().moduli();
    moduli.insert(moduli.end(), B.group().moduli().begin(), B.group().moduli().end());
    const topab::FinAbGroup pairs(moduli);
    const topab::Section p = tj::section_from_json(B.group(), pairs, read_json(s_path));
    for (topab::Index b = 0; b < B.group().order(); ++b) s.table[b] = t.to_structure(p.table[b]);
    try {
      topab::validate_section(r.extension, s);
    } catch (const topab::Error& e) {
      throw topab::Error(topab::ErrorKind::MalformedInput, e.what());
    }
  }
  const topab::FactorSet hs = topab::factor_set_from_section(r.extension, s);
  if (auto bad = topab::topologizing_violation(A.core(), B.core(), hs)) {
    const json diag{{"error", "NotTopologizing"},
                    {"pair", json::array({tj::element_to_json(B.group(), bad->first),
                                          tj::element_to_json(B.group(), bad->second)})},
                    {"value", tj::element_to_json(A.group(), hs(bad->first, bad->second))}};
    std::cerr << diag.dump() << "\n";
    return 3;
  }
  const topab::Extension e = topab::nagao_topology(r.extension, s, A, B);
  const topab::Theta th = topab::theta(r.extension, s);
  json theta_table = json::array();
  for (topab::Index x = 0; x < th.forward.size(); ++x)
    theta_table.push_back(json::array({pair_coords(t, x), tj::element_to_json(e.G().group(), th.forward[x])}));
  json section = json::array();
  for (topab::Index b = 0; b < B.group().order(); ++b)
    section.push_back(json::array(
        {tj::element_to_json(B.group(), b), pair_coords(t, th.backward[s(b)])}));
  const json out{{"group", tj::group_to_json(e.G().group())},
                 {"open_core", tj::subgroup_to_json(e.G().core())},
                 {"theta_table", theta_table},
                 {"section", section},
                 {"factor_set", tj::cocycle_to_json(hs)},
                 {"iota", tj::hom_to_json(r.extension.iota())},
                 {"pi", tj::hom_to_json(r.extension.pi())}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_dual(const std::string& path) {
  const topab::TopAbGroup g = tj::topgroup_from_json(read_json(path));
  std::cout << tj::dual_to_json(topab::dual_group(g)).dump(2) << "\n";
  return 0;
}

int cmd_sections(const std::string& path) {
  const json j = read_json(path);
  const topab::TopAbGroup A = tj::topgroup_from_json(tj::detail::field(j, "A"));
  const topab::TopAbGroup B = tj::topgroup_from_json(tj::detail::field(j, "B"));
  const topab::FactorSet h = read_cocycle(tj::detail::field(j, "cocycle"), A.group(), B.group());
  const topab::Realization r = topab::realize(h);
  const auto sections = topab::enumerate_sections(r.extension);
  std::vector<std::size_t> topologizing;
  for (std::size_t i = 0; i < sections.size(); ++i)
    if (!topab::topologizing_violation(A.core(), B.core(), topab::factor_set_from_section(r.extension, sections[i])))
      topologizing.push_back(i);
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t i : topologizing) {
    bool placed = false;
    for (auto& c : classes)
      if (topab::same_topology(r.extension, A, B, sections[c.front()], sections[i])) {
        c.push_back(i);
        placed = true;
        break;
      }
    if (!placed) classes.push_back({i});
  }
  json list = json::array();
  for (std::size_t i = 0; i < sections.size(); ++i) {
    json table = json::array();
    for (topab::Index b = 0; b < B.group().order(); ++b)
      table.push_back(json::array({tj::element_to_json(B.group(), b), pair_coords(r.twisted, r.twisted.from_structure(sections[i](b)))}));
    list.push_back(json{{"index", i}, {"table", table}});
  }
  json cls = json::array();
  for (const auto& c : classes) {
    const topab::Extension e = topab::nagao_topology(r.extension, sections[c.front()], A, B);
    cls.push_back(json{{"sections", c}, {"open_core", tj::subgroup_to_json(e.G().core())}});
  }
  const json out{{"group", tj::group_to_json(r.extension.G())},
                 {"sections", list},
                 {"section_count", sections.size()},
                 {"topologizing", topologizing},
                 {"topology_classes", cls}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& path, const std::string& out) {
  std::istringstream in(read_file(path));
  std::string line;
  json summary;
  std::vector<json> witnesses;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = tj::parse(line);
    const std::string type = tj::detail::get<std::string>(tj::detail::field(j, "type"), "type");
    if (type == "summary") summary = std::move(j);
    else if (type == "witness") witnesses.push_back(std::move(j));
    else throw topab::Error(topab::ErrorKind::MalformedInput, "unknown line type " + type);
  }
  if (summary.is_null()) throw topab::Error(topab::ErrorKind::MalformedInput, "no summary line");
  std::string md;
  try {
    md = tj::render_markdown(summary, witnesses);
  } catch (const nlohmann::json::exception& e) {
    throw topab::Error(topab::ErrorKind::MalformedInput, e.what());
  }
  if (!out.empty()) write_file(out, md);
  else std::cout << md;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite topological abelian groups: continuity theorems, extensions and duals"};
  app.require_subcommand(1);

  SweepArgs verify_args, search_args;
  auto* verify = app.add_subcommand("verify", "sweep a theorem over its family; exit 1 on conclusion failures");
  add_sweep_options(verify, verify_args, false);
  auto* search = app.add_subcommand("search", "sweep with hypotheses dropped and collect witnesses");
  add_sweep_options(search, search_args, true);

  std::string a_path, b_path, h_path, s_path;
  auto* extend = app.add_subcommand("extend", "twisted group and Nagao topology of a cocycle");
  extend->add_option("A", a_path, "topological group A (JSON)")->required();
  extend->add_option("B", b_path, "topological group B (JSON)")->required();
  extend->add_option("cocycle", h_path, "factor set (JSON)")->required();
  extend->add_option("--section", s_path, "section of the twisted group (JSON)");

  std::string g_path;
  auto* dual = app.add_subcommand("dual", "Pontryagin dual of a topological group");
  dual->add_option("G", g_path, "topological group (JSON)")->required();

  std::string e_path;
  auto* sections = app.add_subcommand("sections", "sections of an extension grouped by induced topology");
  sections->add_option("E", e_path, "extension {A, B, cocycle} (JSON)")->required();

  std::string r_path, r_out;
  auto* report = app.add_subcommand("report", "Markdown summary of a JSON-lines report");
  report->add_option("jsonl", r_path, "report stream")->required();
  report->add_option("--out", r_out, "Markdown output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) return run_sweep(verify_args, "verify");
    if (*search) return run_sweep(search_args, "search");
    if (*extend) return cmd_extend(a_path, b_path, h_path, s_path);
    if (*dual) return cmd_dual(g_path);
    if (*sections) return cmd_sections(e_path);
    if (*report) return cmd_report(r_path, r_out);
  } catch (const topab::Error& e) {
    std::cerr << "topab: " << e.what() << "\n";
    return e.kind() == topab::ErrorKind::NotTopologizing ? 3 : 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "topab: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
