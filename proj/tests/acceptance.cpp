// Acceptance run: one PASS/FAIL line per criterion.
// usage: acceptance <path to topab CLI>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include "oracles.hpp"
#include "topab/duality.hpp"
#include "topab/family.hpp"
#include "topab/report.hpp"
#include "topab/search.hpp"
#include "topab/snake.hpp"
#include "topab/theorems.hpp"

using namespace topab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::size_t failures = 0;
  std::string first_failure;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures++ == 0) first_failure = what;
  }
};

int failed_criteria = 0;

void report(int n, const std::string& name, Outcome& o, double seconds) {
  if (!o.pass) ++failed_criteria;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " " << name << ": " << o.detail.str();
  if (o.failures) std::cout << "; " << o.failures << " failures, first: " << o.first_failure;
  std::cout << " (" << static_cast<long>(seconds * 10) / 10.0 << "s)" << std::endl;
}

template <class F>
void run(int n, const std::string& name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.expect(false, std::string("exception: ") + e.what());
  }
  report(n, name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::vector<TopAbGroup> topgroups(Int n) {
  std::vector<TopAbGroup> out;
  for (const auto& g : all_groups_up_to_order(n))
    for (const auto& s : all_subgroups(g)) out.emplace_back(g, s);
  return out;
}

std::string name_of(const TopAbGroup& t) {
  return json::group_to_json(t.group()).dump() + " core " + json::subgroup_to_json(t.core()).dump();
}

std::set<Index> set_of(const Subgroup& s) { return {s.elements().begin(), s.elements().end()}; }

/// Every cocycle with |A|, |B| <= n and its realized extension.
std::vector<std::pair<FactorSet, GroupExtension>> extensions(Int n) {
  std::vector<std::pair<FactorSet, GroupExtension>> out;
  for (const auto& A : all_groups_up_to_order(n))
    for (const auto& B : all_groups_up_to_order(n))
      for (const auto& h : all_cocycles(A, B)) out.emplace_back(h, realize(h).extension);
  return out;
}

// (a, b) + (a', b') = (a + a' + h(b, b'), b + b') on pair indices a * |B| + b
Index twisted_sum(const FactorSet& h, Index x, Index y) {
  const Index nb = h.B.order();
  const Index a = h.A.add(h.A.add(x / nb, y / nb), h(x % nb, y % nb));
  return a * nb + h.B.add(x % nb, y % nb);
}

// --- criterion 1 ----------------------------------------------------------

void oracle_agreement(Outcome& o) {
  const auto tops = topgroups(8);
  std::vector<std::vector<oracle::Mask>> opens;
  for (const auto& t : tops) opens.push_back(oracle::open_masks(t.group(), t.core().elements()));
  std::size_t instances = 0, continuous = 0;
  for (std::size_t i = 0; i < tops.size(); ++i)
    for (std::size_t j = 0; j < tops.size(); ++j) {
      const auto fs = all_homs(tops[i].group(), tops[j].group());
      for (const auto& f : fs) {
        ++instances;
        const TopHom tf(f, tops[i], tops[j]);
        const bool c = oracle::continuous(f, opens[i], opens[j]);
        o.expect(is_continuous(tf) == c, "is_continuous on " + name_of(tops[i]) + " -> " + name_of(tops[j]));
        if (!c) continue;
        ++continuous;
        // image of every open is the trace of an open on the image
        oracle::Mask img = 0;
        for (Index x = 0; x < f.source().order(); ++x) img |= oracle::bit(f(x));
        std::set<oracle::Mask> traces;
        for (oracle::Mask v : opens[j]) traces.insert(v & img);
        bool s = true;
        for (oracle::Mask u : opens[i]) {
          oracle::Mask fu = 0;
          for (Index x = 0; x < f.source().order(); ++x)
            if (u >> x & 1) fu |= oracle::bit(f(x));
          s = s && traces.count(fu);
        }
        o.expect(is_strict(tf) == s, "is_strict on " + name_of(tops[i]) + " -> " + name_of(tops[j]));
      }
    }
  o.detail << tops.size() << " topological groups, " << instances << " (hom, cores) instances, " << continuous
           << " continuous";
}

// --- criterion 2 ----------------------------------------------------------

void extension_round_trip(Outcome& o) {
  std::size_t checked = 0, exts = 0;
  for (const auto& [h0, e] : extensions(4)) {
    ++exts;
    for (const auto& s : enumerate_sections(e)) {
      ++checked;
      const FactorSet h = factor_set_from_section(e, s);
      const FinAbGroup &A = e.A(), &B = e.B(), &G = e.G();
      bool cocycle_ok = true;
      for (Index b = 0; b < B.order(); ++b)
        for (Index c = 0; c < B.order(); ++c)
          cocycle_ok = cocycle_ok && e.iota()(h(b, c)) == G.sub(G.add(s(b), s(c)), s(B.add(b, c)));
      o.expect(cocycle_ok, "factor set does not measure the section");
      const TwistedGroup t = twisted_group(A, B, h);
      const Theta th = theta(e, s, t);
      const Index n = t.order();
      bool iso = th.forward.size() == G.order() && n == G.order();
      std::vector<bool> hit(G.order(), false);
      for (Index x = 0; x < n && iso; ++x) {
        iso = th.forward[x] < G.order() && !hit[th.forward[x]] && th.backward[th.forward[x]] == x;
        if (iso) hit[th.forward[x]] = true;
      }
      for (Index x = 0; x < n && iso; ++x)
        for (Index y = 0; y < n && iso; ++y) {
          iso = t.add(x, y) == twisted_sum(h, x, y) && th.forward[twisted_sum(h, x, y)] == G.add(th.forward[x], th.forward[y]);
        }
      for (Index a = 0; a < A.order() && iso; ++a) iso = th.forward[a * B.order()] == e.iota()(a);
      for (Index x = 0; x < n && iso; ++x) iso = e.pi()(th.forward[x]) == x % B.order();
      o.expect(iso, "theta is not an isomorphism of extensions");
      bool cord = true;
      for (Index x = 0; x < n; ++x)
        for (Index a = 0; a < A.order(); ++a)
          cord = cord && twisted_sum(h, x, a * B.order()) == A.add(x / B.order(), a) * B.order() + x % B.order() &&
                 t.add(x, t.pair(a, 0)) == t.pair(A.add(t.a_of(x), a), t.b_of(x));
      o.expect(cord, "(a,b) + (a',0) != (a+a',b)");
    }
  }
  o.detail << exts << " extensions, " << checked << " sections";
}

// --- criterion 3 ----------------------------------------------------------

void cocycle_census(Outcome& o) {
  const FinAbGroup Z2 = make_group({2});
  // brute force over all 16 tables Z2 x Z2 -> Z2
  std::size_t brute = 0;
  for (Index code = 0; code < 16; ++code) {
    auto v = [&](Index b, Index c) { return (code >> (2 * b + c)) & 1; };
    bool ok = v(0, 0) == 0 && v(0, 1) == 0 && v(1, 0) == 0;
    for (Index x = 0; x < 2; ++x)
      for (Index y = 0; y < 2; ++y) {
        ok = ok && v(x, y) == v(y, x);
        for (Index z = 0; z < 2; ++z) ok = ok && ((v(x, y) + v((x + y) % 2, z)) % 2) == ((v(y, z) + v(x, (y + z) % 2)) % 2);
      }
    if (ok) ++brute;
  }
  const auto hs = all_cocycles(Z2, Z2);
  std::multiset<std::vector<Int>> structures, expected{{4}, {2, 2}};
  for (const auto& h : hs) {
    std::vector<Int> orders;
    for (Index x = 0; x < 4; ++x) orders.push_back(oracle::order_in(x, [&](Index p, Index q) { return twisted_sum(h, p, q); }));
    const std::vector<Int> inv = oracle::invariant_factors(orders);
    o.expect(inv == twisted_group(Z2, Z2, h).structure().moduli(), "twisted structure disagrees with element orders");
    structures.insert(inv);
  }
  o.expect(brute == 2, "brute force found " + std::to_string(brute) + " cocycles");
  o.expect(hs.size() == 2, "enumeration found " + std::to_string(hs.size()) + " cocycles");
  o.expect(structures == expected, "twisted groups are not Z/4 and Z/2 x Z/2");
  o.detail << hs.size() << " cocycles, twisted groups";
  for (const auto& s : structures) o.detail << " " << json::json(s).dump();
}

// --- criteria 4 and 5 -----------------------------------------------------

/// {iota(a) + s(b) : a in N_A, b in N_B}
std::set<Index> nagao_core(const GroupExtension& e, const Section& s, const Subgroup& na, const Subgroup& nb) {
  std::set<Index> out;
  for (Index a : na.elements())
    for (Index b : nb.elements()) out.insert(e.G().add(e.iota()(a), s(b)));
  return out;
}

bool topologizing(const FactorSet& h, const Subgroup& na, const Subgroup& nb) {
  for (Index b : nb.elements())
    for (Index c : nb.elements())
      if (!na.contains(h(b, c))) return false;
  return true;
}

void nagao_comparison(Outcome& o) {
  std::size_t pairs = 0, differing = 0;
  for (const auto& [h0, e] : extensions(4))
    for (const auto& na : all_subgroups(e.A()))
      for (const auto& nb : all_subgroups(e.B())) {
        const TopAbGroup ta(e.A(), na), tb(e.B(), nb);
        std::vector<Section> top;
        std::vector<std::set<Index>> cores;
        for (const auto& s : enumerate_sections(e)) {
          const bool t = topologizing(factor_set_from_section(e, s), na, nb);
          o.expect(t == is_topologizing(ta, tb, factor_set_from_section(e, s)), "is_topologizing disagrees");
          if (!t) continue;
          top.push_back(s);
          cores.push_back(nagao_core(e, s, na, nb));
          o.expect(cores.back() == set_of(nagao_topology(e, s, ta, tb).G().core()), "Nagao core disagrees");
        }
        for (std::size_t i = 0; i < top.size(); ++i)
          for (std::size_t j = 0; j < top.size(); ++j) {
            bool diff = true;
            for (Index b : nb.elements()) diff = diff && na.contains(e.iota_inverse(e.G().sub(top[i](b), top[j](b))));
            const bool same = cores[i] == cores[j];
            o.expect(same == diff, "core equality and f(N_B) ⊆ N_A disagree");
            o.expect(same_topology(e, ta, tb, top[i], top[j]) == same, "same_topology disagrees");
            ++pairs;
            if (!same) ++differing;
          }
      }
  o.detail << pairs << " section pairs, " << differing << " with different topologies";
}

void discrete_base(Outcome& o) {
  std::size_t checked = 0;
  for (const auto& [h0, e] : extensions(4))
    for (const auto& na : all_subgroups(e.A())) {
      const TopAbGroup ta(e.A(), na), tb = TopAbGroup::discrete(e.B());
      std::optional<Subgroup> first;
      for (const auto& s : enumerate_sections(e)) {
        ++checked;
        const Subgroup core = nagao_topology(e, s, ta, tb).G().core();
        if (!first) first = core;
        o.expect(core == *first, "two sections induce different cores");
      }
    }
  o.detail << checked << " (instance, section) pairs with B discrete";
}

// --- criterion 6 ----------------------------------------------------------

bool brute_topological_extension(const GroupExtension& e, const std::vector<oracle::Mask>& oa, const Subgroup& ng,
                                 const std::vector<oracle::Mask>& ob) {
  const auto og = oracle::open_masks(e.G(), ng.elements());
  return oracle::continuous(e.iota(), oa, og) && oracle::strict(e.iota(), oa, og) &&
         oracle::continuous(e.pi(), og, ob) && oracle::strict(e.pi(), og, ob);
}

void haus_exactness(Outcome& o) {
  std::size_t checked = 0;
  for (const auto& [h0, e] : extensions(4))
    for (const auto& na : all_subgroups(e.A()))
      for (const auto& nb : all_subgroups(e.B())) {
        const auto oa = oracle::open_masks(e.A(), na.elements()), ob = oracle::open_masks(e.B(), nb.elements());
        std::vector<Subgroup> brute;
        for (const auto& ng : all_subgroups(e.G()))
          if (brute_topological_extension(e, oa, ng, ob)) brute.push_back(ng);
        const auto lib = topological_extension_cores(e, na, nb);
        std::set<std::set<Index>> bs, ls;
        for (const auto& s : brute) bs.insert(set_of(s));
        for (const auto& s : lib) ls.insert(set_of(s));
        o.expect(bs == ls, "topological_extension_cores disagrees with brute force");
        if (!na.is_trivial() && !nb.is_trivial()) continue;
        for (const auto& ng : brute) {
          ++checked;
          const FinAbGroup &A = e.A(), &G = e.G(), &B = e.B();
          // separated sequence A/N_A -> G/N_G -> B/N_B, all discrete
          std::set<Index> pre_na, ker_pi, im_iota;
          for (Index a = 0; a < A.order(); ++a)
            if (ng.contains(e.iota()(a))) pre_na.insert(a);
          for (Index g = 0; g < G.order(); ++g)
            if (nb.contains(e.pi()(g))) ker_pi.insert(g);
          for (Index a = 0; a < A.order(); ++a)
            for (Index n : ng.elements()) im_iota.insert(G.add(e.iota()(a), n));
          o.expect(pre_na == set_of(na) && ker_pi == im_iota, "separated sequence not exact");
          // dual sequence B* -> G* -> A*, discrete
          const TopAbGroup ta(A, na), tg(G, ng), tb(B, nb);
          const auto ca = oracle::continuous_characters(ta), cg = oracle::continuous_characters(tg),
                     cb = oracle::continuous_characters(tb);
          std::size_t killing_a = 0;
          for (const auto& c : cg) {
            bool zero = true;
            for (Index a = 0; a < A.order(); ++a) zero = zero && c[e.iota()(a)] == 0;
            if (zero) ++killing_a;
          }
          o.expect(killing_a == cb.size() && cg.size() == ca.size() * cb.size(), "dual sequence not exact");
          const Extension x(e, ta, tg, tb);
          const DualSequence d = dual_extension(x);
          o.expect(d.exact && d.topological, "dual_extension not a topological extension");
          const Verdict v = verify_haus_exactness(ExtensionInstance{e, na, ng, nb});
          o.expect(v.hypotheses_hold() && v.conclusion_holds(), "haus_exactness verifier fails");
        }
      }
  o.detail << checked << " topological extensions in case (a) or (b)";
}

// --- criteria 7 and 8 -----------------------------------------------------

SearchTask task(const std::string& theorem, Int order) {
  SearchTask t;
  t.theorem = theorem;
  t.family.max_group_order = order;
  return t;
}

std::map<std::string, SearchSummary> sweeps;

void exhaustive_verification(Outcome& o) {
  const char* sep = "";
  for (const char* id : {"p3_generalized", "open_fibers", "p3_discrete", "five_lemma_nagao", "five_lemma_topological"}) {
    const SearchResult r = run_search(task(id, 4));
    const SearchCounts& c = r.summary.counts;
    sweeps.emplace(id, r.summary);
    o.expect(c.conclusion_failures == 0, id);
    std::set<std::string> parts;
    for (const auto& w : r.witnesses)
      for (const auto& p : *w.verdict.conclusion)
        if (!p.passed) parts.insert(p.name);
    o.detail << sep << id << " " << c.conclusion_failures << "/" << c.conclusions_checked << " conclusion failures";
    if (!parts.empty()) {
      o.detail << " in";
      for (const auto& p : parts) o.detail << " " << p;
    }
    o.detail << " (family";
    for (const auto& [k, v] : r.summary.family_sizes) o.detail << " " << k << "=" << v;
    o.detail << ", " << c.instances_enumerated << " instances)";
    sep = "; ";
  }
}

void psi_decomposition(Outcome& o) {
  const auto it = sweeps.find("p3_generalized");
  const SearchCounts c = it != sweeps.end() ? it->second.counts : run_search(task("p3_generalized", 4)).summary.counts;
  o.expect(c.psi_checked > 0, "no section pairs checked");
  o.expect(c.psi_failures == 0, std::to_string(c.psi_failures) + " psi failures");
  o.detail << c.psi_failures << " failures in " << c.psi_checked << " section pairs";
}

// --- criterion 9 ----------------------------------------------------------

void duality(Outcome& o) {
  const auto tops = topgroups(16);
  for (const auto& t : tops) {
    const std::string at = " at " + name_of(t);
    const auto chars = oracle::continuous_characters(t);
    const DualGroup d = dual_group(t);
    const Separation sep = separation(t);
    o.expect(d.order() == chars.size(), "|G*| differs from brute force" + at);
    o.expect(d.order() == sep.group.group().order(), "|G*| != |G_Haus|" + at);
    const TopHom ev = evaluation(t);
    std::set<Index> killed;
    for (Index x = 0; x < t.group().order(); ++x) {
      bool all_zero = true;
      for (const auto& c : chars) all_zero = all_zero && c[x] == 0;
      if (all_zero) killed.insert(x);
    }
    o.expect(set_of(kernel(ev.map())) == set_of(t.core()) && killed == set_of(t.core()),
             "evaluation kernel is not the core" + at);
    o.expect(is_bijective(separation_hom(ev, sep, separation(ev.target())).map()), "G_Haus -> G** not bijective" + at);
    o.expect(is_bijective(dual_hom(sep.projection)), "dual of q_G not an isomorphism" + at);
  }
  o.detail << tops.size() << " topological groups";
}

// --- criteria 10 and 11 ---------------------------------------------------

int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void negative_control(Outcome& o, const std::string& cli, const fs::path& dir) {
  const fs::path out = dir / "negative";
  const int rc = shell(quote(cli) + " search p3_generalized --drop alpha_continuous --max-order 4 --out " +
                       quote(out.string()));
  o.expect(rc == 0, "search exited " + std::to_string(rc));
  std::ifstream in(out.string() + ".jsonl");
  std::string line;
  std::size_t witnesses = 0, constructed = 0;
  const FinAbGroup Z2 = make_group({2});
  std::getline(in, line);
  while (std::getline(in, line)) {
    const VerificationReport w = json::report_from_json(json::parse(line).at("report"));
    ++witnesses;
    const VerificationReport again = verify("p3_generalized", w.instance, w.dropped);
    o.expect(again.verdict.hypotheses_hold() && again.verdict.failure(), "witness does not replay");
    const SquareInstance x = square_instance(w.instance);
    if (x.square.alpha() == Homomorphism::identity(Z2) && x.na1.is_whole() && x.na2.is_trivial()) ++constructed;
  }
  o.expect(witnesses > 0, "no witnesses");
  o.expect(constructed > 0, "identity Z/2 (indiscrete) -> Z/2 (discrete) witness not reported");
  o.detail << witnesses << " witnesses, all replayed; " << constructed << " with alpha = id from indiscrete to discrete Z/2";
}

void determinism(Outcome& o, const std::string& cli, const fs::path& dir) {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"verify", "verify p3_discrete --max-order 4 --seed 11"},
      {"search", "search five_lemma_nagao --max-order 3 --seed 5 --max-witnesses 20"},
      {"search_drop", "search p3_generalized --drop sections_compatible --max-order 3"}};
  for (const auto& [name, args] : runs) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "3"}) {
      const fs::path out = dir / (name + "_" + std::to_string(outputs.size()));
      shell("TOPAB_THREADS=" + std::string(threads) + " " + quote(cli) + " " + args + " --out " + quote(out.string()));
      outputs.push_back(slurp(out.string() + ".jsonl") + slurp(out.string() + ".md"));
    }
    o.expect(!outputs[0].empty(), name + " produced no report");
    o.expect(outputs[0] == outputs[1], name + " differs between repeated runs");
    o.expect(outputs[0] == outputs[2], name + " differs between thread counts");
  }
  o.detail << runs.size() << " runs repeated with 1, 1 and 3 threads, reports byte-identical";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <topab>\n";
    return 2;
  }
  const std::string cli = fs::absolute(argv[1]).string();
  const fs::path dir = fs::temp_directory_path() / ("topab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  run(1, "oracle agreement", oracle_agreement);
  run(2, "extension round-trip", extension_round_trip);
  run(3, "cocycle census", cocycle_census);
  run(4, "Nagao comparison", nagao_comparison);
  run(5, "discrete base", discrete_base);
  run(6, "separation and duality exactness", haus_exactness);
  run(7, "exhaustive theorem verification", exhaustive_verification);
  run(8, "psi decomposition", psi_decomposition);
  run(9, "duality", duality);
  run(10, "negative control", [&](Outcome& o) { negative_control(o, cli, dir); });
  run(11, "determinism", [&](Outcome& o) { determinism(o, cli, dir); });

  fs::remove_all(dir);
  std::cout << (11 - failed_criteria) << "/11 criteria passed" << std::endl;
  return failed_criteria == 0 ? 0 : 1;
}
