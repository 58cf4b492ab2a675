// wm: exact word-measure calculator and statistical cross-checks.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wordmeasure/measures.hpp"

using json = nlohmann::json;
using namespace wm;

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kToolVersion = "0.1.0";

json exact(const mpq_class& q) { return q.get_str(); }

json coefficients(const Polynomial& p) {
  json out = json::array();
  for (const auto& c : p.coefficients()) out.push_back(c.get_str());
  return out;
}

json laurent_json(const RationalFunction& f, int depth) {
  json out = json::array();
  for (const auto& t : laurent_prefix(f, depth)) out.push_back({{"exponent", t.exponent}, {"coefficient", exact(t.coefficient)}});
  return out;
}

json ratfun_json(const RationalFunction& f) {
  return {{"string", f.to_string()},
          {"numerator", f.numerator().to_string()},
          {"denominator", f.denominator().to_string()},
          {"numerator_coefficients", coefficients(f.numerator())},
          {"denominator_coefficients", coefficients(f.denominator())},
          {"n_min", f.n_min()},
          {"laurent", laurent_json(f, 3)}};
}

json words_json(const std::vector<Word>& ws) {
  json out = json::array();
  for (const Word& w : ws) out.push_back(to_string(w));
  return out;
}

json int_or(const std::optional<int>& v, const char* missing) { return v ? json(*v) : json(missing); }

json graph_json(const CoreGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.src, e.dst, e.label});
  return {{"vertices", g.num_vertices()}, {"edges", edges}, {"rank", g.rank()}};
}

Word read_word(const std::string& text, int rank) { return parse_word(text, rank); }

std::vector<Word> read_gens(const std::string& text, int rank) {
  std::vector<Word> gens;
  std::size_t start = 0;
  int widest = rank;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != ',') continue;
    gens.push_back(parse_word(std::string_view(text).substr(start, i - start), rank));
    widest = std::max(widest, gens.back().ambient_rank());
    start = i + 1;
  }
  for (Word& g : gens) g = g.with_rank(widest);
  return gens;
}

void print_plain(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) print_plain(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) print_plain(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

struct Globals {
  std::string format = "json";
  unsigned threads = 1;
  bool no_timing = false;
  int rank = 0;
};

EnumerationOptions enum_opts(const Globals& g) {
  EnumerationOptions o = EnumerationOptions::from_environment();
  o.threads = g.threads;
  return o;
}

ExhaustiveOptions exhaustive_opts(const Globals& g) {
  ExhaustiveOptions o = ExhaustiveOptions::from_environment();
  o.threads = g.threads;
  return o;
}

json chi_json(const ChiReport& r) {
  json witnesses = json::array();
  for (const Witness& w : r.witnesses) witnesses.push_back({{"basis", words_json(w.basis)}, {"rank", w.rank}});
  return {{"chi", int_or(r.chi, "-inf")},
          {"C", r.leading_coefficient},
          {"witnesses", witnesses},
          {"chi2", int_or(r.chi2, "-inf")},
          {"c2", r.c2},
          {"unique_ae", r.unique_ae},
          {"trace", ratfun_json(r.trace)}};
}

json surface_json(const SurfaceVerdict& v) {
  json checks = json::array();
  for (const SurfaceCheck& c : v.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"evidence", c.evidence}});
  return {{"orientation", v.orientation == Orientation::Orientable ? "orientable" : "nonorientable"},
          {"genus", v.genus},
          {"checks", checks},
          {"overall", v.consistent ? "CONSISTENT" : "INCONSISTENT"},
          {"note", "consistent with necessary conditions only; not a proof of Aut(F_r)-equivalence"}};
}

std::optional<Modulus> family_modulus(const GroupSpec& g) {
  switch (g.family) {
    case GroupFamily::Symmetric: return Modulus(1);
    case GroupFamily::Wreath: return Modulus(g.m);
    case GroupFamily::CircleWreath: return Modulus::infinity();
    default: return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact expected traces of word maps on generalized symmetric groups"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "plain"}));
  app.add_option("--threads", g.threads, "Worker threads for enumeration")->check(CLI::Range(1u, 256u));
  app.add_flag("--no-timing", g.no_timing, "Omit the timing field");
  app.add_option("--rank", g.rank, "Ambient rank r (default: largest generator used)")->check(CLI::NonNegativeNumber);

  std::string word_text, m_text = "1", gens_text, group_text;
  int genus = 1, dim = 8;
  long long samples = 100000;
  std::uint64_t seed = 1;
  double band = 4.0;
  unsigned chains = 1;
  bool list = false, orientable = false, nonorientable = false, mc = false;

  auto* trace = app.add_subcommand("trace", "Exact expected trace on C_m wr S_N (m=1: S_N, inf: S^1 wr S_N)");
  trace->add_option("--word", word_text)->required();
  trace->add_option("--m", m_text)->required();

  auto* chi = app.add_subcommand("chi", "chi_m(w), witnesses and second-order data");
  chi->add_option("--word", word_text)->required();
  chi->add_option("--m", m_text)->required();

  auto* pi = app.add_subcommand("pi", "Primitivity rank from the S_N trace");
  pi->add_option("--word", word_text)->required();

  auto* fringe = app.add_subcommand("fringe", "Subgroups X-covered by <w>");
  fringe->add_option("--word", word_text)->required();
  fringe->add_flag("--list", list, "List each subgroup");
  auto* fringe_m = fringe->add_option("--m", m_text, "Restrict to Q_m(w)");

  auto* fix = app.add_subcommand("subgroup-fix", "Expected common fixed points of a random image of a subgroup");
  fix->add_option("--gens", gens_text, "Comma-separated generators")->required();

  auto* bounds = app.add_subcommand("bounds", "Lower bounds on commutator and square length");
  bounds->add_option("--word", word_text)->required();

  auto* surface = app.add_subcommand("surface-test", "Necessary conditions for being a surface word");
  surface->add_option("--word", word_text)->required();
  surface->add_option("--genus", genus)->required();
  auto* o_flag = surface->add_flag("--orientable", orientable);
  auto* n_flag = surface->add_flag("--nonorientable", nonorientable);
  o_flag->excludes(n_flag);
  surface->add_flag("--mc", mc, "Add a Monte Carlo check on U(N) or O(N)");
  surface->add_option("--dim", dim)->check(CLI::PositiveNumber);
  surface->add_option("--samples", samples)->check(CLI::PositiveNumber);
  surface->add_option("--seed", seed);
  surface->add_option("--band", band, "Tolerance in standard errors")->check(CLI::PositiveNumber);
  surface->add_option("--chains", chains)->check(CLI::Range(1u, 256u));

  auto* sample = app.add_subcommand("sample", "Monte Carlo trace estimate");
  sample->add_option("--word", word_text)->required();
  sample->add_option("--group", group_text, "sym:N, wreath:M:N, circle:N, u:N or o:N")->required();
  sample->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed);
  sample->add_option("--chains", chains)->check(CLI::Range(1u, 256u));

  auto* oracle = app.add_subcommand("oracle", "Exhaustive exact average over (C_m wr S_N)^r");
  oracle->add_option("--word", word_text)->required();
  oracle->add_option("--m", m_text)->required();
  oracle->add_option("--dim", dim)->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  json env;
  env["schema_version"] = kSchemaVersion;
  env["tool_version"] = kToolVersion;
  try {
    CLI::App* cmd = app.get_subcommands().front();
    env["command"] = cmd->get_name();
    json input, params, result;

    if (cmd == trace || cmd == chi || cmd == pi || cmd == fringe || cmd == bounds) {
      const Word w = read_word(word_text, g.rank);
      input = {{"word", to_string(w)}, {"rank", w.ambient_rank()}, {"cyclic_core", to_string(cyclic_reduce(w).reduced)}};
      const WordAnalysis a(w, enum_opts(g));
      if (cmd == trace) {
        const Modulus m = Modulus::parse(m_text);
        params["m"] = m.to_string();
        result = ratfun_json(a.trace(m));
        result["coverage_bound"] = coverage_validity_bound(w);
      } else if (cmd == chi) {
        const Modulus m = Modulus::parse(m_text);
        params["m"] = m.to_string();
        result = chi_json(chi_report(a, m));
      } else if (cmd == pi) {
        const PrimitivityRank p = primitivity_rank(a);
        result = {{"pi", int_or(p.pi, "inf")}, {"C", p.leading_coefficient}, {"trace", ratfun_json(p.trace)}};
      } else if (cmd == fringe) {
        if (a.trivial()) throw InputError("the fringe of the trivial word is not enumerated");
        std::optional<Modulus> m;
        if (*fringe_m) {
          m = Modulus::parse(m_text);
          params["m"] = m->to_string();
        }
        params["list"] = list;
        json items = json::array();
        long long count = 0;
        for (const FringeElement& f : a.fringe()) {
          if (m && !passes_km_filter(f.profile, *m)) continue;
          ++count;
          if (!list) continue;
          json item = graph_json(f.graph);
          item["basis"] = words_json(spanning_tree_basis(f.graph));
          item["signed_counts"] = f.profile.signed_counts;
          item["unsigned_counts"] = f.profile.unsigned_counts;
          item["rewrite"] = to_string(rewrite_in_basis(a.cyclic_core(), f.graph));
          items.push_back(item);
        }
        result["size"] = count;
        if (list) result["subgroups"] = items;
      } else {
        const LengthBounds b = length_bounds(a);
        result = {{"chi_infinity", int_or(b.chi_infinity, "-inf")},
                  {"chi_2", int_or(b.chi_2, "-inf")},
                  {"cl_lower", int_or(b.cl_lower, "inf")},
                  {"min_sql_2cl_lower", int_or(b.mixed_lower, "inf")}};
      }
    } else if (cmd == fix) {
      const std::vector<Word> gens = read_gens(gens_text, g.rank);
      input = {{"gens", words_json(gens)}, {"rank", gens.front().ambient_rank()}};
      const RationalFunction f = expected_fixed_points_subgroup(gens, enum_opts(g));
      const int rk = core_graph_of_subgroup(gens).rank();
      result = ratfun_json(f);
      result["subgroup_rank"] = rk;
      result["equals_n_to_1_minus_rank"] = f == RationalFunction::power_of_n(1 - rk);
    } else if (cmd == surface) {
      if (!orientable && !nonorientable) throw InputError("surface-test needs --orientable or --nonorientable");
      const Word w = read_word(word_text, g.rank);
      input = {{"word", to_string(w)}, {"rank", w.ambient_rank()}};
      MonteCarloOptions mco{mc, dim, samples, seed, band, chains};
      params = {{"genus", genus}, {"orientation", orientable ? "orientable" : "nonorientable"}, {"mc", mc}};
      if (mc) params.update({{"dim", dim}, {"samples", samples}, {"seed", seed}, {"band", band}, {"chains", chains}});
      result = surface_json(surface_test(w, genus, orientable ? Orientation::Orientable : Orientation::NonOrientable,
                                         mco, enum_opts(g)));
    } else if (cmd == sample) {
      const Word w = read_word(word_text, g.rank);
      const GroupSpec spec = GroupSpec::parse(group_text);
      input = {{"word", to_string(w)}, {"rank", w.ambient_rank()}};
      params = {{"group", spec.to_string()}, {"samples", samples}, {"seed", seed}, {"chains", chains}};
      const TraceEstimate est = estimate_trace(w, spec, samples, seed, chains);
      result = {{"mean_re", est.mean.real()},
                {"mean_im", est.mean.imag()},
                {"stderr_re", est.stderr_re},
                {"stderr_im", est.stderr_im},
                {"samples", est.samples},
                {"seed", est.seed},
                {"chains", est.chains}};
      std::optional<RationalFunction> formula;
      if (const auto m = family_modulus(spec)) {
        try {
          formula = WordAnalysis(w, enum_opts(g)).trace(*m);
        } catch (const CapExceeded&) {
          result["exact_formula"] = "unavailable: enumeration cap exceeded";
        }
      }
      if (formula) {
        const RationalFunction& f = *formula;
        result["exact_formula"] = f.to_string();
        if (spec.dimension >= f.n_min()) {
          const mpq_class v = f.evaluate_at(spec.dimension);
          result["exact_target"] = exact(v);
          result["deviation_in_stderr"] =
              est.stderr_re > 0 ? (est.mean.real() - v.get_d()) / est.stderr_re : 0.0;
        }
      }
    } else if (cmd == oracle) {
      const Word w = read_word(word_text, g.rank);
      const Modulus m = Modulus::parse(m_text);
      if (m.is_infinite()) throw InputError("oracle needs a finite m");
      input = {{"word", to_string(w)}, {"rank", w.ambient_rank()}};
      params = {{"m", m.to_string()}, {"dim", dim}};
      const mpq_class v = exhaustive_trace(w, m.value(), dim, exhaustive_opts(g));
      result["exhaustive"] = exact(v);
      const RationalFunction f = WordAnalysis(w, enum_opts(g)).trace(m);
      result["formula"] = f.to_string();
      if (dim >= f.n_min()) {
        result["formula_value"] = exact(f.evaluate_at(dim));
        result["agree"] = f.evaluate_at(dim) == v;
      }
    }

    env["input"] = input;
    env["parameters"] = params.is_null() ? json::object() : params;
    env["result"] = result;
    if (!g.no_timing)
      env["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  } catch (const CapExceeded& e) {
    std::cerr << "wm: resource cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "wm: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wm: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "wm: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wm: internal error: " << e.what() << "\n";
    return 1;
  }

  if (g.format == "plain")
    print_plain(env, "", std::cout);
  else
    std::cout << env.dump(2) << "\n";
  return 0;
}
