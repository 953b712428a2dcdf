#pragma once

// Task files, JSON-lines report streams and Markdown summaries for sweeps.

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "topab/json.hpp"
#include "topab/search.hpp"

namespace topab::json {

inline json family_to_json(const FamilySpec& f) {
  json out{{"max_group_order", f.max_group_order}, {"seed", f.seed}, {"generators", f.generators}};
  if (f.max_cocycle_count) out["max_cocycle_count"] = *f.max_cocycle_count;
  else out["max_cocycle_count"] = "all";
  return out;
}

inline FamilySpec family_from_json(const json& j) {
  if (!j.is_object()) detail::malformed("family must be an object");
  FamilySpec f;
  if (j.contains("max_group_order")) f.max_group_order = detail::get<Int>(j["max_group_order"], "max_group_order");
  if (j.contains("max_cocycle_count")) {
    const json& c = j["max_cocycle_count"];
    if (c.is_string()) {
      if (c.get<std::string>() != "all") detail::malformed("max_cocycle_count is an integer or \"all\"");
    } else {
      f.max_cocycle_count = detail::get<std::uint64_t>(c, "max_cocycle_count");
    }
  }
  if (j.contains("seed")) f.seed = detail::get<std::uint64_t>(j["seed"], "seed");
  if (j.contains("generators")) f.generators = detail::get<std::vector<std::string>>(j["generators"], "generators");
  return f;
}

inline json task_to_json(const SearchTask& t) {
  return json{{"theorem_id", t.theorem},
              {"dropped_hypotheses", t.dropped},
              {"family", family_to_json(t.family)},
              {"stop_at_first", t.stop_at_first},
              {"max_witnesses", t.max_witnesses}};
}

inline SearchTask task_from_json(const json& j) {
  SearchTask t;
  t.theorem = detail::get<std::string>(detail::field(j, "theorem_id"), "theorem_id");
  if (j.contains("dropped_hypotheses"))
    t.dropped = detail::get<std::vector<std::string>>(j["dropped_hypotheses"], "dropped_hypotheses");
  if (j.contains("family")) t.family = family_from_json(j["family"]);
  if (j.contains("stop_at_first")) t.stop_at_first = detail::get<bool>(j["stop_at_first"], "stop_at_first");
  if (j.contains("max_witnesses")) t.max_witnesses = detail::get<std::size_t>(j["max_witnesses"], "max_witnesses");
  return t;
}

inline json counts_to_json(const SearchCounts& c) {
  return json{{"instances_enumerated", c.instances_enumerated}, {"instances_sampled", c.instances_sampled},
              {"hypotheses_failed", c.hypotheses_failed},       {"conclusions_checked", c.conclusions_checked},
              {"conclusion_failures", c.conclusion_failures},   {"psi_checked", c.psi_checked},
              {"psi_failures", c.psi_failures}};
}

inline json summary_to_json(const SearchSummary& s, const std::string& mode) {
  json sizes = json::object();
  for (const auto& [k, v] : s.family_sizes) sizes[k] = v;
  return json{{"type", "summary"},
              {"theorem_id", s.task.theorem},
              {"mode", mode},
              {"dropped", s.task.dropped},
              {"family", family_to_json(s.task.family)},
              {"stop_at_first", s.task.stop_at_first},
              {"counts", counts_to_json(s.counts)},
              {"family_sizes", sizes},
              {"witnesses", s.witnesses},
              {"stopped_early", s.stopped_early},
              {"model_collapse", s.model_collapse}};
}

inline json witness_line(const std::string& theorem, std::size_t index, const VerificationReport& r) {
  return json{{"type", "witness"}, {"theorem_id", theorem}, {"index", index}, {"report", report_to_json(r)}};
}

/// One summary line, then one line per witness.
inline void write_jsonl(std::ostream& os, const SearchResult& r, const std::string& mode) {
  os << summary_to_json(r.summary, mode).dump() << '\n';
  for (std::size_t i = 0; i < r.witnesses.size(); ++i)
    os << witness_line(r.summary.task.theorem, i, r.witnesses[i]).dump() << '\n';
}

inline std::string cores_line(const json& instance) {
  std::string out;
  for (const auto& [name, node] : instance["nodes"].items()) {
    if (!out.empty()) out += ", ";
    out += name + " " + node["group"]["moduli"].dump() + " core " + node["open_core"]["elements"].dump();
  }
  return out;
}

/// Markdown from a summary line and its witness lines.
inline std::string render_markdown(const json& summary, const std::vector<json>& witnesses) {
  std::ostringstream md;
  const json& c = summary.at("counts");
  md << "# " << summary.at("theorem_id").get<std::string>() << " (" << summary.at("mode").get<std::string>()
     << ")\n\n";
  md << "Dropped hypotheses: ";
  if (summary.at("dropped").empty()) md << "none";
  else
    for (std::size_t i = 0; i < summary["dropped"].size(); ++i)
      md << (i ? ", " : "") << summary["dropped"][i].get<std::string>();
  md << "\n\nFamily: " << summary.at("family").dump() << "\n\n";
  md << "| count | value |\n|---|---|\n";
  for (const char* k : {"instances_enumerated", "instances_sampled", "hypotheses_failed", "conclusions_checked",
                        "conclusion_failures"})
    md << "| " << k << " | " << c.at(k).get<std::uint64_t>() << " |\n";
  md << "\npsi identity: " << c.at("psi_failures").get<std::uint64_t>() << " failures in "
     << c.at("psi_checked").get<std::uint64_t>() << " section pairs\n\n";
  md << "Family sizes:";
  for (const auto& [k, v] : summary.at("family_sizes").items()) md << " " << k << " " << v.get<std::uint64_t>() << ";";
  md << "\n\nStopped early: " << (summary.at("stopped_early").get<bool>() ? "yes" : "no") << "\n\n";
  md << "## Finite-model notes\n\n";
  for (const auto& n : summary.at("model_collapse")) md << "- " << n.get<std::string>() << "\n";
  md << "\n## Witnesses (" << witnesses.size() << ")\n\n";
  if (witnesses.empty()) md << "None.\n";
  for (const auto& w : witnesses) {
    const json& r = w.at("report");
    md << w.at("index").get<std::size_t>() + 1 << ". failed:";
    for (const auto& p : r.at("witness").at("failed_parts")) md << " " << p.get<std::string>();
    md << "; " << cores_line(r.at("instance")) << "\n";
  }
  return md.str();
}

inline std::string render_markdown(const SearchResult& r, const std::string& mode) {
  std::vector<json> ws;
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) ws.push_back(witness_line(r.summary.task.theorem, i, r.witnesses[i]));
  return render_markdown(summary_to_json(r.summary, mode), ws);
}

}  // namespace topab::json
