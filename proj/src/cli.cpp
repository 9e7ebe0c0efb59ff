#include "histlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "histlab/errors.hpp"
#include "histlab/family_io.hpp"
#include "histlab/histories.hpp"
#include "histlab/theorems.hpp"
#include "histlab/trajectory.hpp"
#include "json.hpp"

namespace histlab::cli {

namespace {

using nlohmann::json;

/// Disagreements between the geometric two-level condition and the full
/// functional are tolerated when |value| falls inside this band.
constexpr double kTwoLevelBand = 1e-7;

struct Options {
  std::string input;
  std::string mode = "weak";
  std::optional<double> eps;
  std::uint64_t seed = 0;
  bool json = false;
  bool d_matrix = false;
  std::string out;
  std::size_t n = 0;
  std::string i_vec;
  std::string n_vec;
  std::string f_vec;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double x, int precision = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, std::abs(x) < 0.5 * std::pow(10.0, -precision) ? 0.0 : x);
  return buf;
}

std::string fmt(CNum z, int precision = 9) {
  const double im = std::abs(z.imag()) < 0.5 * std::pow(10.0, -precision) ? 0.0 : z.imag();
  return fmt(z.real(), precision) + (im < 0 ? "-" : "+") + fmt(std::abs(im), precision) + "i";
}

json index_json(const HistoryIndex& idx) { return idx.alpha; }

json node_json(NodeId n) { return node_name(n); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
  if (!f) throw InputError("failed writing " + path);
}

struct LoadedFamily {
  FamilyDocument doc;
  HistoryFamily family;
  Tolerance tol;
};

LoadedFamily load(const Options& o) {
  FamilyDocument doc = read_family_document(o.input);
  const Tolerance tol = document_tolerance(doc, o.eps);
  HistoryFamily family = to_family(doc, o.eps);
  return {std::move(doc), std::move(family), tol};
}

ClassificationMode parse_mode(const std::string& m) {
  if (m == "weak") return ClassificationMode::weak;
  if (m == "medium") return ClassificationMode::medium;
  throw InputError("--mode must be weak or medium");
}

// ---------------------------------------------------------------------------

int cmd_check(const Options& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const ClassificationMode mode = parse_mode(o.mode);
  const LoadedFamily lf = load(o);
  const DecoherenceReport r = classify(lf.family, mode);
  const bool satisfied = passes(r, mode);

  json report;
  report["command"] = "check";
  report["mode"] = to_string(mode);
  report["eps"] = lf.tol.eps;
  report["classification"] = to_string(*r.classification);
  report["satisfied"] = satisfied;
  report["enumeration"] = r.enumeration == Enumeration::full ? "full" : "support";
  json probs = json::array();
  double total = 0.0;
  for (std::size_t a = 0; a < r.size(); ++a) {
    probs.push_back({{"history", index_json(r.histories[a])}, {"probability", r.probabilities[a]}});
    total += r.probabilities[a];
  }
  report["probabilities"] = std::move(probs);
  report["probability_sum"] = total;
  json viol = json::array();
  for (const auto& v : r.violations) {
    viol.push_back({{"alpha", index_json(v.alpha)}, {"beta", index_json(v.beta)}, {"d", complex_to_json(v.value)}});
  }
  report["violations"] = std::move(viol);
  if (o.d_matrix) {
    json d = json::array();
    for (std::size_t a = 0; a < r.size(); ++a) {
      json row = json::array();
      for (std::size_t b = 0; b < r.size(); ++b) row.push_back(complex_to_json(r.d(a, b)));
      d.push_back(std::move(row));
    }
    report["d_matrix"] = std::move(d);
  }

  if (o.json) {
    out << report.dump(2) << "\n";
  } else {
    out << "classification: " << to_string(*r.classification) << "\n";
    out << "mode " << to_string(mode) << ": " << (satisfied ? "satisfied" : "NOT satisfied") << "\n";
    out << "histories: " << r.size() << (r.enumeration == Enumeration::support ? " (nonzero-probability support)" : "")
        << "\n";
    for (std::size_t a = 0; a < r.size(); ++a) {
      out << "  " << to_string(r.histories[a]) << "  p = " << fmt(r.probabilities[a]) << "\n";
    }
    out << "probability sum: " << fmt(total) << "\n";
    out << "violations (" << to_string(mode) << "): " << r.violations.size() << "\n";
    for (const auto& v : r.violations) {
      out << "  " << to_string(v.alpha) << " vs " << to_string(v.beta) << ": D = " << fmt(v.value) << "\n";
    }
    if (o.d_matrix) {
      out << "D matrix:\n";
      for (std::size_t a = 0; a < r.size(); ++a) {
        out << " ";
        for (std::size_t b = 0; b < r.size(); ++b) out << "  " << fmt(r.d(a, b), 6);
        out << "\n";
      }
    }
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << "elapsed: " << fmt(ms, 1) << " ms\n";
  }
  return satisfied ? kSatisfied : kNotSatisfied;
}

// ---------------------------------------------------------------------------

json connectivity_summary(const TrajectoryGraph& g, const ConnectivityLabel& labels) {
  json cols = json::array();
  for (std::size_t c = 0; c < g.num_columns(); ++c) {
    std::size_t over = 0;
    for (std::size_t i = 0; i < g.column_size(c); ++i) over += labels.count({c, i}) > 2 ? 1 : 0;
    const std::size_t connected = labels.connected_in_column(c);
    cols.push_back({{"column", c},
                    {"nodes", g.column_size(c)},
                    {"unconnected", g.column_size(c) - connected},
                    {"singly", labels.singly_in_column(c)},
                    {"doubly", labels.doubly_in_column(c)},
                    {"over_connected", over}});
  }
  return cols;
}

TrajectoryGraph graph_or_input_error(const HistoryFamily& f, Tolerance tol) {
  try {
    return build_graph(f, tol);
  } catch (const UnsupportedInputError& e) {
    throw InputError(e.what());
  }
}

int cmd_graph(const Options& o, std::ostream& out, std::ostream& err) {
  const LoadedFamily lf = load(o);
  const TrajectoryGraph g = graph_or_input_error(lf.family, lf.tol);
  const ConnectivityLabel labels = connectivity(g);
  const std::string dot = to_dot(g, labels);
  std::ostream& summary_out = o.out.empty() ? err : out;
  if (o.out.empty()) {
    out << dot;
  } else {
    write_text(o.out, dot);
  }

  const json cols = connectivity_summary(g, labels);
  if (o.json) {
    json report{{"command", "graph"}, {"columns", cols}, {"edges", g.edges().size()}};
    if (!o.out.empty()) report["dot"] = o.out;
    summary_out << report.dump(2) << "\n";
  } else {
    summary_out << "columns: " << g.num_columns() << ", edges: " << g.edges().size() << "\n";
    for (const auto& c : cols) {
      summary_out << "  column " << c["column"].get<std::size_t>() << ": singly " << c["singly"].get<std::size_t>()
                  << ", doubly " << c["doubly"].get<std::size_t>() << ", over-connected "
                  << c["over_connected"].get<std::size_t>() << ", unconnected "
                  << c["unconnected"].get<std::size_t>() << "\n";
    }
    if (!o.out.empty()) summary_out << "wrote " << o.out << "\n";
  }
  return kSatisfied;
}

// ---------------------------------------------------------------------------

struct TheoremResult {
  std::string name;
  std::string title;
  Verdict verdict = Verdict::pass;
  std::string detail;
  json data = json::object();
};

Vec3 bloch_vector(const CVector& v) {
  const CNum a = v[0];
  const CNum b = v[1];
  const CNum off = std::conj(a) * b;
  return {2.0 * off.real(), 2.0 * off.imag(), std::norm(a) - std::norm(b)};
}

std::vector<TheoremResult> run_theorems(const HistoryFamily& f, Tolerance tol, json& summary) {
  std::vector<TheoremResult> results;
  const std::vector<std::pair<std::string, std::string>> names{
      {"theorem1", "at most two paths per pair, pi/2 phase gap"},
      {"theorem2", "recurring events obstruct decoherence"},
      {"theorem3", "every transition fits one of four cases"},
      {"theorem4", "only congruent insertions at single-step transitions"},
      {"theorem5", "noncongruent transitions bounded by n + [n/2] - 2"},
      {"theorem6", "count-preserving transitions are 1x1 / 2x2 block diagonal"}};

  if (!f.initial().is_pure() || !f.all_fine()) {
    for (const auto& [name, title] : names) {
      results.push_back({name, title, Verdict::precondition_failed,
                         "needs a pure initial state and fine-grained event sets", json::object()});
    }
    return results;
  }

  const TrajectoryGraph g = build_graph(f, tol);
  const ConnectivityLabel labels = connectivity(g);
  const bool weak = g.decoherence_level() != DecoherenceLevel::none;
  const std::string not_weak = "family is not weakly decohering";

  // Theorem 1
  {
    TheoremResult r{names[0].first, names[0].second, Verdict::pass, {}, json::object()};
    const Theorem1Report t1 = check_theorem1(g, tol);
    r.verdict = t1.verdict;
    std::size_t single = 0;
    std::size_t two = 0;
    double worst_cos = 0.0;
    for (const auto& p : t1.pairs) {
      if (p.path_count == 1) ++single;
      if (p.path_count == 2) ++two;
      if (p.cos_phase_gap) worst_cos = std::max(worst_cos, std::abs(*p.cos_phase_gap));
    }
    r.data = {{"pairs_with_one_path", single}, {"pairs_with_two_paths", two}, {"max_abs_cos_phase_gap", worst_cos}};
    r.detail = t1.verdict == Verdict::pass
                   ? std::to_string(single) + " single-path and " + std::to_string(two) +
                         " two-path pairs; max |cos(phase gap)| = " + fmt(worst_cos, 12)
                   : t1.detail;
    results.push_back(std::move(r));
  }

  // Theorem 2
  {
    TheoremResult r{names[1].first, names[1].second, Verdict::pass, {}, json::object()};
    const auto recurrences = detect_recurrence(g, tol);
    json list = json::array();
    for (const auto& rec : recurrences) {
      list.push_back({{"event", node_json(rec.event)}, {"absent_column", rec.absent_column}, {"twin", node_json(rec.twin)}});
    }
    r.data = {{"recurrences", list}};
    if (recurrences.empty()) {
      r.detail = "no recurrences";
    } else if (!weak) {
      r.detail = std::to_string(recurrences.size()) + " recurrence(s) found, each a decoherence obstruction; " +
                 "family fails weak decoherence as predicted";
    } else {
      r.verdict = Verdict::violation;
      r.detail = "counterexample: recurrence " + node_name(recurrences.front().event) + " -> " +
                 node_name(recurrences.front().twin) + " in a weakly decohering family";
    }
    results.push_back(std::move(r));
  }

  // Theorem 3
  std::vector<TransitionClass> transitions;
  for (std::size_t c = 1; c < g.num_columns(); ++c) transitions.push_back(classify_transition(g, c, tol));
  {
    TheoremResult r{names[2].first, names[2].second, Verdict::pass, {}, json::object()};
    json list = json::array();
    for (std::size_t c = 1; c < g.num_columns(); ++c) {
      const auto& t = transitions[c - 1];
      list.push_back({{"column", c},
                      {"kind", to_string(t.kind)},
                      {"delta_connected", t.delta_connected},
                      {"delta_doubly", t.delta_doubly}});
      if (t.alarm) {
        r.verdict = Verdict::violation;
        r.detail = "counterexample: transition into column " + std::to_string(c) + " fits none of the four cases";
      }
    }
    r.data = {{"transitions", list}};
    if (!weak) {
      r.verdict = Verdict::precondition_failed;
      r.detail = not_weak;
    } else if (r.verdict == Verdict::pass) {
      std::string kinds;
      for (std::size_t c = 1; c < g.num_columns(); ++c) {
        kinds += (c > 1 ? ", " : "") + std::to_string(c) + ":" + to_string(transitions[c - 1].kind);
      }
      r.detail = kinds;
    }
    results.push_back(std::move(r));
  }

  // Theorem 4
  {
    TheoremResult r{names[3].first, names[3].second, Verdict::pass, {}, json::object()};
    if (!weak) {
      r.verdict = Verdict::precondition_failed;
      r.detail = not_weak;
    } else {
      const auto transition_set = discrete_transition_set(f.dim());
      std::size_t tested = 0;
      std::size_t positions = 0;
      for (std::size_t p = 1; p < g.family().num_sets() && r.verdict == Verdict::pass; ++p) {
        const auto& t = transitions[p];  // graph column p + 1
        const bool one_step =
            (t.delta_connected == 1 && t.delta_doubly != 2) || (t.delta_connected == 0 && t.delta_doubly == 2);
        if (!one_step) continue;
        ++positions;
        std::vector<EventSet> candidates{g.family().event_set(p - 1), g.family().event_set(p)};
        for (const auto& w : transition_set) candidates.push_back(next_event_set(g.family().event_set(p - 1), w, tol));
        for (const auto& cand : candidates) {
          const InsertionReport ir = insertion_admissible(g.family(), p, cand, tol);
          ++tested;
          if (ir.verdict == Verdict::violation) {
            r.verdict = Verdict::violation;
            r.detail = "counterexample at insertion point " + std::to_string(p) + ": " + ir.detail;
            break;
          }
        }
      }
      r.data = {{"single_step_transitions", positions}, {"candidates_tested", tested}};
      if (positions == 0) {
        r.verdict = Verdict::precondition_failed;
        r.detail = "no single-step transitions between event sets";
      } else if (r.verdict == Verdict::pass) {
        r.detail = std::to_string(tested) + " insertions at " + std::to_string(positions) +
                   " single-step transition(s); only congruent ones kept decoherence";
      }
    }
    results.push_back(std::move(r));
  }

  // Theorem 5
  {
    TheoremResult r{names[4].first, names[4].second, Verdict::pass, {}, json::object()};
    const std::size_t n = labels.connected_in_column(g.num_columns() - 1);
    const std::size_t count = noncongruent_transition_count(g, tol);
    summary["noncongruent_transitions"] = count;
    summary["final_connected_events"] = n;
    if (!weak) {
      r.verdict = Verdict::precondition_failed;
      r.detail = not_weak + " (" + std::to_string(count) + " noncongruent transitions)";
    } else {
      const std::size_t bound = n >= 2 ? max_noncongruent_bound(n) : 0;
      r.data = {{"connected_events", n}, {"noncongruent_transitions", count}, {"bound", bound}};
      if (count > bound) {
        r.verdict = Verdict::violation;
        r.detail = "counterexample: " + std::to_string(count) + " noncongruent transitions exceed the bound " +
                   std::to_string(bound);
      } else {
        r.detail = std::to_string(count) + " noncongruent transitions, n = " + std::to_string(n) + ", bound " +
                   std::to_string(bound);
        if (count == bound && n == f.dim() && f.dim() <= 4 && n >= 2) {
          const auto set = discrete_transition_set(f.dim());
          const auto found = find_admissible_extension(g.family(), set, tol);
          r.data["extension_candidates"] = set.size();
          if (found) {
            r.verdict = Verdict::violation;
            r.detail = "counterexample: candidate " + std::to_string(*found) +
                       " extends a saturated family by a noncongruent decohering transition";
          } else {
            r.detail += "; saturated, no admissible extension among " + std::to_string(set.size()) + " candidates";
          }
        }
      }
    }
    results.push_back(std::move(r));
  }

  // Theorem 6
  {
    TheoremResult r{names[5].first, names[5].second, Verdict::pass, {}, json::object()};
    if (!weak) {
      r.verdict = Verdict::precondition_failed;
      r.detail = not_weak;
    } else {
      json list = json::array();
      std::size_t one = 0;
      std::size_t two = 0;
      std::size_t checked = 0;
      for (std::size_t c = 1; c < g.num_columns(); ++c) {
        if (transitions[c - 1].delta_connected != 0) continue;
        const BlockStructure bs = extract_blocks(g, c, tol);
        ++checked;
        one += bs.count_of_size(1);
        two += bs.count_of_size(2);
        list.push_back({{"column", c},
                        {"blocks_1x1", bs.count_of_size(1)},
                        {"blocks_2x2", bs.count_of_size(2)},
                        {"off_block_mass", bs.off_block_mass}});
        if (bs.verdict == Verdict::violation && r.verdict == Verdict::pass) {
          r.verdict = Verdict::violation;
          r.detail = bs.detail;
        }
      }
      r.data = {{"transitions", list}};
      if (checked == 0) {
        r.verdict = Verdict::precondition_failed;
        r.detail = "no count-preserving transitions";
      } else if (r.verdict == Verdict::pass) {
        r.detail = std::to_string(checked) + " count-preserving transition(s): " + std::to_string(two) +
                   " block(s) 2x2, " + std::to_string(one) + " block(s) 1x1";
      }
    }
    results.push_back(std::move(r));
  }

  // Spin-1/2 geometric condition for two-event qubit families.
  if (f.dim() == 2 && f.num_sets() == 2) {
    TheoremResult r{"two_level", "(i x n).(n x f) = 0 iff weak decoherence", Verdict::pass, {}, json::object()};
    const TwoLevelSetup s{bloch_vector(g.vector(kInitialNode)), bloch_vector(g.vector({1, 0})),
                         bloch_vector(g.vector({2, 0}))};
    const double value = two_level_value(s);
    const bool geometric = std::abs(value) <= tol.eps;
    r.data = {{"value", value}, {"geometric_condition", geometric}, {"weak", weak}};
    if (geometric != weak && std::abs(value) > kTwoLevelBand) {
      r.verdict = Verdict::violation;
      r.detail = "counterexample: value " + fmt(value, 12) + " disagrees with the functional";
    } else {
      r.detail = "value " + fmt(value, 12) + (geometric == weak ? ", agrees" : ", boundary band");
    }
    results.push_back(std::move(r));
  }
  return results;
}

int cmd_theorems(const Options& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedFamily lf = load(o);
  const DecoherenceLevel level = decoherence_level(lf.family);
  json summary = json::object();
  const auto results = run_theorems(lf.family, lf.tol, summary);
  const bool violated =
      std::any_of(results.begin(), results.end(), [](const auto& t) { return t.verdict == Verdict::violation; });

  if (o.json) {
    json report{{"command", "theorems"}, {"eps", lf.tol.eps}, {"classification", to_string(level)}};
    for (const auto& [k, v] : summary.items()) report[k] = v;
    json list = json::array();
    for (const auto& t : results) {
      list.push_back({{"name", t.name}, {"verdict", to_string(t.verdict)}, {"detail", t.detail}, {"data", t.data}});
    }
    report["theorems"] = std::move(list);
    out << report.dump(2) << "\n";
  } else {
    out << "classification: " << to_string(level) << "\n";
    if (summary.contains("noncongruent_transitions")) {
      out << "noncongruent transitions: " << summary["noncongruent_transitions"].get<std::size_t>()
          << " (final connected events: " << summary["final_connected_events"].get<std::size_t>() << ")\n";
    }
    for (const auto& t : results) {
      out << t.name << " [" << t.title << "]: " << to_string(t.verdict) << "\n    " << t.detail << "\n";
    }
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << "elapsed: " << fmt(ms, 1) << " ms\n";
  }
  return violated ? kTheoremViolation : kSatisfied;
}

// ---------------------------------------------------------------------------

int cmd_witness(const Options& o, std::ostream& out) {
  if (o.n < 2 || o.n > 8) throw InputError("--n must lie in [2, 8]");
  const WitnessFamily w = generate_maximal_family(o.n, o.seed);
  const std::string text = to_json(to_document(w.family)).dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
    return kSatisfied;
  }
  write_text(o.out, text);
  if (o.json) {
    json t = json::array();
    for (const auto& tc : w.transitions) t.push_back(to_string(tc.kind));
    out << json{{"command", "witness"},
                {"n", w.n},
                {"seed", o.seed},
                {"noncongruent_transitions", w.noncongruent_count},
                {"transitions", t},
                {"out", o.out}}
               .dump(2)
        << "\n";
  } else {
    out << "witness n = " << w.n << ": " << w.noncongruent_count << " noncongruent transitions (bound "
        << max_noncongruent_bound(w.n) << "), weakly decohering\n";
    out << "wrote " << o.out << "\n";
  }
  return kSatisfied;
}

// ---------------------------------------------------------------------------

Vec3 parse_direction(const std::string& text, const char* flag) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(part, &used));
      if (part.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw InputError(std::string(flag) + ": cannot parse \"" + part + "\" as a real number");
    }
  }
  if (xs.size() != 3) throw InputError(std::string(flag) + ": expected three comma-separated reals");
  const double norm = std::sqrt(xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
    throw InputError(std::string(flag) + ": not a unit vector (norm " + std::to_string(norm) + ")");
  }
  return {xs[0] / norm, xs[1] / norm, xs[2] / norm};
}

int cmd_twolevel(const Options& o, std::ostream& out) {
  const Tolerance tol = o.eps ? Tolerance(*o.eps) : Tolerance{};
  const TwoLevelSetup s{parse_direction(o.i_vec, "--i"), parse_direction(o.n_vec, "--n"),
                       parse_direction(o.f_vec, "--f")};
  const double value = two_level_value(s);
  const bool geometric = two_level_condition(s, tol);
  const DecoherenceReport r = classify(two_level_family(s, tol), ClassificationMode::weak);
  const bool weak = *r.classification != DecoherenceLevel::none;
  const bool agree = geometric == weak;
  const bool in_band = !agree && std::abs(value) <= kTwoLevelBand;
  const std::string status = agree ? "agree" : in_band ? "boundary" : "DISAGREE";

  if (o.json) {
    out << json{{"command", "twolevel"},
                {"value", value},
                {"geometric_condition", geometric},
                {"classification", to_string(*r.classification)},
                {"agreement", status}}
               .dump(2)
        << "\n";
  } else {
    out << "value (i x n).(n x f) = " << fmt(value, 12) << "\n";
    out << "geometric condition: " << (geometric ? "holds" : "fails") << "\n";
    out << "classification: " << to_string(*r.classification) << "\n";
    out << "agreement: " << status << "\n";
  }
  return agree || in_band ? kSatisfied : kTheoremViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decoherence functionals, trajectory graphs and structural checks for quantum histories", "histlab"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--eps", o.eps, "absolute tolerance (overrides the file)");
    sub->add_flag("--json", o.json, "emit the machine-readable report");
  };

  auto* check = app.add_subcommand("check", "classify a family as weakly / medium decohering");
  check->add_option("input", o.input, "family JSON file")->required();
  check->add_option("--mode", o.mode, "weak or medium")->capture_default_str();
  check->add_flag("--d-matrix", o.d_matrix, "include the full decoherence functional");
  add_common(check);

  auto* graph = app.add_subcommand("graph", "write the trajectory graph as DOT");
  graph->add_option("input", o.input, "family JSON file")->required();
  graph->add_option("--out", o.out, "DOT output path (stdout if absent)");
  add_common(graph);

  auto* theorems = app.add_subcommand("theorems", "run the structural checks on a family");
  theorems->add_option("input", o.input, "family JSON file")->required();
  add_common(theorems);

  auto* witness = app.add_subcommand("witness", "generate a family with the maximal number of noncongruent steps");
  witness->add_option("--n", o.n, "number of connected events / dimension, 2..8")->required();
  witness->add_option("--seed", o.seed, "random frame seed (0 = canonical frame)")->capture_default_str();
  witness->add_option("--out", o.out, "family output path (stdout if absent)");
  add_common(witness);

  auto* twolevel = app.add_subcommand("twolevel", "spin-1/2 geometric condition vs the full functional");
  twolevel->add_option("--i", o.i_vec, "initial polarization x,y,z")->required();
  twolevel->add_option("--n", o.n_vec, "first measurement axis x,y,z")->required();
  twolevel->add_option("--f", o.f_vec, "second measurement axis x,y,z")->required();
  add_common(twolevel);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSatisfied;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSatisfied;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*check) return cmd_check(o, out);
    if (*graph) return cmd_graph(o, out, err);
    if (*theorems) return cmd_theorems(o, out);
    if (*witness) return cmd_witness(o, out);
    if (*twolevel) return cmd_twolevel(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DocumentError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace histlab::cli
