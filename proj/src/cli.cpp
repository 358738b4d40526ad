#include "rankone/cli.hpp"

#include "rankone/correlation.hpp"
#include "rankone/diagnostics.hpp"
#include "rankone/error.hpp"
#include "rankone/orbit.hpp"
#include "rankone/spec_io.hpp"
#include "rankone/sumset.hpp"
#include "rankone/tower.hpp"
#include "rankone/weaktop.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <memory>
#include <random>
#include <set>
#include <sstream>

namespace rankone::cli {

namespace {

using nlohmann::json;

struct Options {
  // spec source and budgets
  std::string spec_path, family;
  int max_stage = kDefaultMaxStage;
  std::uint64_t element_budget = kDefaultElementBudget;
  std::string tol = "1/1000000000";
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 0;
  bool plot = false;

  // command arguments
  int stages = 4, m = 2, m_max = 4, m_lo = 0, m_hi = 6, k = 2, extra = 3;
  std::int64_t n = 6, bound = 10000, steps = 1, from = 0, to = 0;
  std::uint64_t budget = 10000, truncation = 17;
  std::string a = "0:0", b, target = "0:0", mode = "smooth", index_set, level = "0", policy = "random";
  std::string height = "0", digits, map_s, map_t, map;
  int stage = 0, column_height = 2, d_height = 2, rank = 2;
};

// Exact cells for an interval, plus midpoint and half-width when plotting.
std::string cells(const RationalInterval& v, bool plot) {
  std::string s = to_string(v.lower) + "," + to_string(v.upper);
  if (plot) {
    std::ostringstream f;
    const Rational mid = (v.lower + v.upper) / 2, half = (v.upper - v.lower) / 2;
    f << std::setprecision(12) << mid.get_d() << "," << half.get_d();
    s += "," + f.str();
  }
  return s;
}

std::string plot_header(const std::string& name, bool plot) {
  return name + "_lower," + name + "_upper" + (plot ? "," + name + "_mid," + name + "_halfwidth" : "");
}

json interval_json(const RationalInterval& v) {
  return json{{"lower", to_string(v.lower)}, {"upper", to_string(v.upper)}, {"exact", v.exact()}};
}

json envelope(const std::string& command, const ConstructionSpec* spec) {
  json doc{{"schema", kSchemaVersion}, {"command", command}};
  if (spec) doc["spec"] = spec_to_json(*spec);
  return doc;
}

std::vector<std::int64_t> parse_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto v = to_int64(parse_bigint(item));
    if (!v) throw Error(ErrorKind::InvalidArgument, "'" + item + "' does not fit 64 bits");
    out.push_back(*v);
  }
  return out;
}

// "j:h1,h2,..." -> levels h1, h2, ... of C_j.
LevelSet parse_level_set(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "level set '" + text + "' is not j:h1,h2,...");
  LevelSet out;
  out.column = static_cast<int>(parse_list(text.substr(0, colon)).at(0));
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) out.heights.push_back(parse_bigint(item));
  std::sort(out.heights.begin(), out.heights.end());
  return out;
}

DyadicMap parse_map(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("map is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("k") || !doc.contains("perm")) {
    throw Error(ErrorKind::InvalidArgument, "map must be {\"k\": rank, \"perm\": [...]}");
  }
  DyadicMap t{doc.at("k").get<int>(), doc.at("perm").get<std::vector<std::uint32_t>>()};
  t.validate();
  return t;
}

json map_json(const DyadicMap& t) { return json{{"k", t.k}, {"perm", t.perm}}; }

std::unique_ptr<Tower> make_tower(const Options& o) {
  if (o.spec_path.empty() == o.family.empty()) {
    throw Error(ErrorKind::InvalidArgument, "give exactly one of --spec and --family");
  }
  ConstructionSpec spec = o.spec_path.empty() ? ConstructionSpec::named(parse_family(o.family))
                                              : load_spec_file(o.spec_path);
  if (o.max_stage < 1) throw Error(ErrorKind::InvalidArgument, "--max-stage must be positive");
  if (o.element_budget < 1) throw Error(ErrorKind::InvalidArgument, "--element-budget must be positive");
  spec.max_stage = o.max_stage;
  spec.validate();
  return std::make_unique<Tower>(std::move(spec), o.element_budget);
}

Rational tolerance(const Options& o) {
  const Rational t = parse_rational(o.tol);
  if (t <= 0) throw Error(ErrorKind::InvalidArgument, "--tol must be positive");
  return t;
}

void emit(std::ostream& out, const Options& o, const std::string& csv, const json& doc) {
  if (o.format == "json") {
    out << doc.dump(2) << '\n';
  } else {
    out << csv;
  }
}

std::string join(const std::vector<BigInt>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + to_string(v[i]);
  return s;
}

json stage_json(const TowerStage& st) {
  json sp = json::array(), hs = json::array();
  for (const auto& s : st.spacers) sp.push_back(to_string(s));
  for (const auto& h : st.height_set) hs.push_back(to_string(h));
  return json{{"n", st.n},           {"height", to_string(st.height)},
              {"width", to_string(st.width)}, {"cuts", st.cuts},
              {"spacers", sp},       {"height_set", hs},
              {"max_descendant", to_string(st.max_descendant)}};
}

void cmd_tower(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  if (o.stages < 0) throw Error(ErrorKind::InvalidArgument, "--stages must be nonnegative");
  std::string csv = "n,height,width,cuts,spacers,max_descendant\n";
  json doc = envelope("tower", &t->spec());
  doc["stages"] = json::array();
  for (int n = 0; n <= o.stages && n <= t->last_stage(); ++n) {
    const auto& st = t->stage(n);
    csv += std::to_string(n) + "," + to_string(st.height) + "," + to_string(st.width) + "," +
           std::to_string(st.cuts) + "," + join(st.spacers) + "," + to_string(st.max_descendant) + "\n";
    doc["stages"].push_back(stage_json(st));
  }
  emit(out, o, csv, doc);
}

void cmd_heights(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  if (o.m < 0) throw Error(ErrorKind::InvalidArgument, "--m must be nonnegative");
  std::string csv = "n,height,max_descendant,kappa,height_set\n";
  json doc = envelope("heights", &t->spec());
  doc["rows"] = json::array();
  for (int n = 0; n <= o.m; ++n) {
    const auto& st = t->stage(n);
    const BigInt kap = kappa(*t, n);
    csv += std::to_string(n) + "," + to_string(st.height) + "," + to_string(st.max_descendant) + "," +
           to_string(kap) + "," + join(st.height_set) + "\n";
    json row = stage_json(st);
    row["kappa"] = to_string(kap);
    doc["rows"].push_back(row);
  }
  emit(out, o, csv, doc);
}

void cmd_corr(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  if (o.n < 1) throw Error(ErrorKind::InvalidArgument, "--n must be at least 1");
  const auto f = parse_level_set(o.a);
  const auto series = weights_and_sums(*t, f, o.n, tolerance(o));
  std::ostringstream csv;
  if (o.plot) {
    csv << "k," << plot_header("u", true) << "," << plot_header("a", true) << ",is_kappa_mark\n";
    const std::set<std::int64_t> marks(series.kappa_marks.begin(), series.kappa_marks.end());
    for (std::int64_t k = 0; k < o.n; ++k) {
      csv << k << "," << cells(series.u(k), true) << "," << cells(series.a(k + 1), true) << ","
          << marks.count(k + 1) << "\n";
    }
  } else {
    write_series_csv(csv, series);
  }
  json doc = envelope("corr", &t->spec());
  doc["stage"] = series.stage;
  doc["exact"] = series.exact;
  doc["terms"] = json::array();
  for (const auto& term : series.terms) {
    doc["terms"].push_back(json{{"k", term.k}, {"u", interval_json(term.u)}, {"a", interval_json(term.prefix)}});
  }
  json marks = json::array();
  for (const auto m : series.kappa_marks) marks.push_back(m);
  doc["kappa_marks"] = marks;
  emit(out, o, csv.str(), doc);
}

void cmd_export(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  json doc = envelope("export", &t->spec());
  doc["stages"] = json::array();
  for (int n = 0; n <= o.stages && n <= t->last_stage(); ++n) doc["stages"].push_back(stage_json(t->stage(n)));
  // export always writes JSON: it is the spec file format.
  out << doc.dump(2) << '\n';
}

LevelSet second_set(const Options& o) { return parse_level_set(o.b.empty() ? o.a : o.b); }

void cmd_diag_wre(const Options& o, std::ostream& out, bool curve, const std::string& kappa_list) {
  const auto t = make_tower(o);
  const auto a = parse_level_set(o.a), b = second_set(o);
  std::vector<BigInt> ns;
  if (curve) {
    for (int m = 1; m <= o.m_max; ++m) ns.push_back(kappa(*t, m));
  } else if (!kappa_list.empty()) {
    for (const auto v : parse_list(kappa_list)) ns.push_back(BigInt(static_cast<long>(v)));
  } else {
    ns.push_back(BigInt(static_cast<long>(o.n)));
  }
  std::string csv = "n," + plot_header("ratio", o.plot) + ",target,stage\n";
  json doc = envelope("diag wre", &t->spec());
  doc["rows"] = json::array();
  for (const auto& n : ns) {
    const auto v = wre_ratio(*t, a, b, n);
    csv += to_string(n) + "," + cells(v.ratio, o.plot) + "," + to_string(v.target) + "," + std::to_string(v.stage) + "\n";
    doc["rows"].push_back(json{{"n", to_string(n)}, {"ratio", interval_json(v.ratio)}, {"target", to_string(v.target)},
                               {"stage", v.stage}});
  }
  if (curve) {
    const auto rep = wre_curve_kappa(*t, a, b, o.m_max);
    doc["summary"] = interval_json(rep.summary);
    doc["verdict"] = rep.verdict;
  }
  emit(out, o, csv, doc);
}

void cmd_diag_rwm(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto v = rwm_deviation(*t, parse_level_set(o.a), second_set(o), o.n, tolerance(o));
  json doc = envelope("diag rwm", &t->spec());
  doc["n"] = o.n;
  doc["deviation"] = interval_json(v);
  emit(out, o, "n," + plot_header("deviation", o.plot) + "\n" + std::to_string(o.n) + "," + cells(v, o.plot) + "\n", doc);
}

void cmd_diag_renyi(const Options& o, std::ostream& out, bool curve) {
  const auto t = make_tower(o);
  std::vector<std::int64_t> ns;
  if (curve) {
    for (int m = 1; m <= o.m_max; ++m) ns.push_back(kappa(*t, m).get_si());
  } else {
    ns.push_back(o.n);
  }
  std::string csv = "n," + plot_header("ratio", o.plot) + "\n";
  json doc = envelope("diag renyi", &t->spec());
  doc["rows"] = json::array();
  for (const auto n : ns) {
    const auto v = renyi_ratio(*t, n);
    csv += std::to_string(n) + "," + cells(v, o.plot) + "\n";
    doc["rows"].push_back(json{{"n", n}, {"ratio", interval_json(v)}});
  }
  emit(out, o, csv, doc);
}

void cmd_diag_bre(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto p = bre_sup_profile(*t, o.n, o.m);
  std::string csv = "level," + plot_header("value", o.plot) + "\n";
  json doc = envelope("diag bre", &t->spec());
  doc["n"] = o.n;
  doc["m"] = o.m;
  doc["sup"] = interval_json(p.sup);
  doc["argmax"] = p.argmax;
  doc["levels"] = json::array();
  for (const auto& l : p.levels) {
    csv += std::to_string(l.level) + "," + cells(l.value, o.plot) + "\n";
    doc["levels"].push_back(json{{"level", l.level}, {"value", interval_json(l.value)}});
  }
  csv += "sup," + cells(p.sup, o.plot) + "\n";
  emit(out, o, csv, doc);
}

void cmd_diag_zerotype(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto wins = zerotype_scan(*t, o.m_lo, o.m_hi);
  std::string csv = "n,window_lo,window_hi," + plot_header("max", o.plot) + ",argmax,stage\n";
  json doc = envelope("diag zerotype", &t->spec());
  doc["windows"] = json::array();
  for (const auto& w : wins) {
    const std::string arg = w.argmax ? to_string(*w.argmax) : "";
    csv += std::to_string(w.n) + "," + to_string(w.lo) + "," + to_string(w.hi) + "," + cells(w.max, o.plot) + "," +
           arg + "," + std::to_string(w.stage) + "\n";
    doc["windows"].push_back(json{{"n", w.n},
                                  {"lo", to_string(w.lo)},
                                  {"hi", to_string(w.hi)},
                                  {"max", interval_json(w.max)},
                                  {"argmax", w.argmax ? json(arg) : json(nullptr)},
                                  {"stage", w.stage}});
  }
  emit(out, o, csv, doc);
}

std::vector<RationalInterval> u_series(const Tower& t, const LevelSet& f, std::int64_t len, const Rational& tol) {
  const auto s = weights_and_sums(t, f, len, tol);
  std::vector<RationalInterval> out;
  for (std::int64_t k = 0; k < len; ++k) out.push_back(s.u(k));
  return out;
}

void cmd_diag_seq(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto mode = parse_seq_mode(o.mode);
  const Rational tol = tolerance(o);
  const std::int64_t len = o.n + 1;
  const auto u = u_series(*t, parse_level_set(o.a), len, tol);
  std::vector<RationalInterval> v;
  if (!o.b.empty()) v = u_series(*t, parse_level_set(o.b), len, tol);
  else if (mode == SeqMode::StrongCesaro) v = u;
  const auto r = seq_functionals(u, v, parse_rational(o.level), parse_list(o.index_set), o.n, mode);
  json doc = envelope("diag seq", &t->spec());
  doc["mode"] = to_string(mode);
  doc["n"] = o.n;
  doc["value"] = interval_json(r);
  emit(out, o, "mode,n," + plot_header("value", o.plot) + "\n" + to_string(mode) + "," + std::to_string(o.n) + "," +
                   cells(r, o.plot) + "\n",
       doc);
}

void cmd_recur_witness(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto w = recurrence_witness(*t, parse_level_set(o.a), o.k, o.budget);
  json doc = envelope("recur witness", &t->spec());
  doc["k"] = o.k;
  std::string csv = "k,n," + plot_header("bound", o.plot) + ",stage,source\n";
  if (w) {
    doc["witness"] = json{{"n", to_string(w->n)},
                          {"bound", interval_json(w->bound.value)},
                          {"stage", w->bound.stage},
                          {"source", w->source}};
    csv += std::to_string(o.k) + "," + to_string(w->n) + "," + cells(w->bound.value, o.plot) + "," +
           std::to_string(w->bound.stage) + "," + w->source + "\n";
  } else {
    doc["witness"] = nullptr;
    doc["note"] = "no witness among the candidates tried; this is not a non-recurrence claim";
  }
  emit(out, o, csv, doc);
}

void cmd_recur_certify(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto v = non_recurrence_certificate(*t, o.k, o.bound);
  const std::string cand = v.candidate ? to_string(*v.candidate) : "";
  json doc = envelope("recur certify", &t->spec());
  doc["k"] = o.k;
  doc["bound"] = to_string(v.bound);
  doc["certified"] = v.certified;
  doc["candidate"] = v.candidate ? json(cand) : json(nullptr);
  doc["digit_stage"] = v.digit_stage;
  doc["brute_stage"] = v.brute_stage;
  emit(out, o,
       "k,bound,certified,candidate,stage\n" + std::to_string(o.k) + "," + to_string(v.bound) + "," +
           (v.certified ? "true" : "false") + "," + cand + "," + std::to_string(v.digit_stage) + "\n",
       doc);
}

PointAddress parse_point(const Options& o, const Tower& t) {
  PointAddress p{o.stage, parse_bigint(o.height), parse_list(o.digits)};
  p.validate(t);
  return p;
}

json point_json(const PointAddress& p) {
  return json{{"stage", p.stage}, {"height", to_string(p.height)}, {"digits", p.digits}};
}

std::string digits_text(const std::vector<std::int64_t>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? " " : "") + std::to_string(d[i]);
  return s;
}

void cmd_orbit_apply(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto p = parse_point(o, *t);
  const auto r = apply_T(*t, p, BigInt(static_cast<long>(o.steps)));
  json doc = envelope("orbit apply", &t->spec());
  doc["from"] = point_json(p);
  doc["steps"] = o.steps;
  std::string csv = "stage,height,digits,needs_digits\n";
  if (const auto* q = std::get_if<PointAddress>(&r)) {
    doc["to"] = point_json(*q);
    csv += std::to_string(q->stage) + "," + to_string(q->height) + "," + digits_text(q->digits) + ",0\n";
  } else {
    const int need = std::get<NeedsDigits>(r).stages;
    doc["needs_digits"] = need;
    csv += ",,," + std::to_string(need) + "\n";
  }
  emit(out, o, csv, doc);
}

void cmd_orbit_visits(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto p = parse_point(o, *t);
  const auto r = visit_count(*t, p, parse_level_set(o.target), o.from, o.to);
  json doc = envelope("orbit visits", &t->spec());
  doc["point"] = point_json(p);
  doc["range"] = {o.from, o.to};
  std::string csv = "k_lo,k_hi,count,needs_digits\n" + std::to_string(o.from) + "," + std::to_string(o.to) + ",";
  if (const auto* c = std::get_if<std::int64_t>(&r)) {
    doc["count"] = *c;
    csv += std::to_string(*c) + ",0\n";
  } else {
    doc["needs_digits"] = std::get<NeedsDigits>(r).stages;
    csv += "," + std::to_string(std::get<NeedsDigits>(r).stages) + "\n";
  }
  emit(out, o, csv, doc);
}

void cmd_orbit_coverage(const Options& o, std::ostream& out) {
  const auto t = make_tower(o);
  const auto r = coverage_counts(*t, o.m, parse_digit_policy(o.policy), o.seed, o.extra);
  if (const auto* need = std::get_if<NeedsDigits>(&r)) {
    throw Error(ErrorKind::BudgetExceeded, "sampled points need " + std::to_string(need->stages) +
                                               " more digits than the stage budget allows");
  }
  const auto& rep = std::get<CoverageReport>(r);
  json doc = envelope("orbit coverage", &t->spec());
  doc["m"] = rep.stage;
  doc["policy"] = o.policy;
  doc["descendants"] = rep.descendants;
  doc["min"] = rep.min;
  doc["max"] = rep.max;
  doc["within_bounds"] = rep.min >= rep.descendants && rep.max <= 2 * rep.descendants;
  json hist = json::array();
  for (const auto& [c, f] : rep.histogram) hist.push_back({c, f});
  doc["histogram"] = hist;
  std::ostringstream csv;
  write_histogram_csv(csv, rep);
  emit(out, o, csv.str(), doc);
}

void cmd_wt_dist(const Options& o, std::ostream& out) {
  const auto s = parse_map(o.map_s), t = parse_map(o.map_t);
  const auto d = metric_d(s, t, o.truncation);
  json doc = envelope("wt dist", nullptr);
  doc["truncation"] = o.truncation;
  doc["distance"] = json{{"partial", to_string(d.partial)}, {"tail", to_string(d.tail)}};
  emit(out, o, "truncation,partial,tail\n" + std::to_string(o.truncation) + "," + to_string(d.partial) + "," +
                   to_string(d.tail) + "\n",
       doc);
}

std::string cell_list(const DyadicSet& a) {
  std::string s;
  for (std::size_t c = 0; c < a.cells.size(); ++c)
    if (a.cells[c]) s += (s.empty() ? "" : " ") + std::to_string(c);
  return s;
}

void cmd_wt_cyclic(const Options& o, std::ostream& out) {
  const DyadicMap t = o.map.empty() ? random_cyclic(o.rank, o.seed) : parse_map(o.map);
  const auto v = cyclic_membership(t);
  json doc = envelope("wt cyclic", nullptr);
  doc["map"] = map_json(t);
  doc["member"] = v.member;
  std::string csv = "position,cell\n";
  if (v.column) {
    json col = json::array();
    for (std::size_t i = 0; i < v.column->size(); ++i) {
      csv += std::to_string(i) + "," + cell_list((*v.column)[i]) + "\n";
      col.push_back(cell_list((*v.column)[i]));
    }
    doc["column"] = col;
  }
  emit(out, o, csv, doc);
}

// A Rokhlin column for a cyclic map: `height` consecutive cycle positions from each chosen start.
PartitionColumn sample_column(const PartitionColumn& cycle, int height, std::mt19937_64& rng) {
  const int slots = static_cast<int>(cycle.size()) / height;
  PartitionColumn out(static_cast<std::size_t>(height), DyadicSet{cycle[0].level, {}});
  for (int s = 0; s < slots; ++s) {
    if (rng() % 2 == 0 && !(s == slots - 1 && out[0].empty())) continue;
    for (int i = 0; i < height; ++i) {
      out[static_cast<std::size_t>(i)] =
          set_union(out[static_cast<std::size_t>(i)], cycle[static_cast<std::size_t>(s * height + i)]);
    }
  }
  return out;
}

void cmd_wt_partmetrics(const Options& o, std::ostream& out) {
  const auto t = random_cyclic(o.rank, o.seed);
  const auto cycle = *cyclic_membership(t).column;
  const int m = o.column_height, n = o.d_height;
  if (m < 1 || n < 1 || m > static_cast<int>(cycle.size()) || n > static_cast<int>(cycle.size())) {
    throw Error(ErrorKind::InvalidArgument, "column heights must lie in [1, k 2^k]");
  }
  std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto c = sample_column(cycle, m, rng);
  const auto d = sample_column(cycle, n, rng);
  const Rational pt = partition_P_T(d, c, t);
  const Rational p1 = partition_P({d[0]}, c);
  const Rational bound = n * p1 + n * c[0].measure();
  json doc = envelope("wt partmetrics", nullptr);
  doc["map"] = map_json(t);
  doc["rho_C_C"] = to_string(rho(c, c));
  doc["P_T_D_C"] = to_string(pt);
  doc["P_B1_C"] = to_string(p1);
  doc["bound"] = to_string(bound);
  doc["holds"] = pt <= bound;
  emit(out, o,
       "rho_C_C,P_T_D_C,P_B1_C,bound,holds\n" + to_string(rho(c, c)) + "," + to_string(pt) + "," + to_string(p1) +
           "," + to_string(bound) + "," + (pt <= bound ? "true" : "false") + "\n",
       doc);
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::BudgetExceeded ? kExitBudget : kExitValidation; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  std::function<void(std::ostream&)> action;
  bool curve = false;
  std::string kappa_list;

  CLI::App app{"Exact computations on rank-one cutting-and-stacking transformations", "rankone-lab"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool needs_spec) {
    if (needs_spec) {
      sub->add_option("--spec", o.spec_path, "construction spec JSON file");
      sub->add_option("--family", o.family, "built-in family: hajian_kakutani, ztmr, steep5");
      sub->add_option("--max-stage", o.max_stage, "stage budget");
      sub->add_option("--element-budget", o.element_budget, "largest descendant set to materialize");
      sub->add_option("--tol", o.tol, "interval width tolerance, p/q");
    }
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", o.output, "write results to this file instead of stdout");
    sub->add_option("--seed", o.seed, "seed for sampling policies");
    sub->add_flag("--plot", o.plot, "add midpoint and half-width float columns");
  };
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, bool needs_spec,
                  std::function<void(std::ostream&)> fn) {
    auto* sub = parent->add_subcommand(name, help);
    common(sub, needs_spec);
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };

  auto* tower = leaf(&app, "tower", "stage table: heights, widths, cuts, spacers", true, [&](std::ostream& s) { cmd_tower(o, s); });
  tower->add_option("--stages", o.stages, "last stage to list");
  auto* heights = leaf(&app, "heights", "height sets H_n, M_n and kappa", true, [&](std::ostream& s) { cmd_heights(o, s); });
  heights->add_option("--m", o.m, "last stage to list");
  auto* corr = leaf(&app, "corr", "u_k and a_n series", true, [&](std::ostream& s) { cmd_corr(o, s); });
  corr->add_option("--n", o.n, "series length");
  corr->add_option("--set", o.a, "level set j:h1,h2,... (default 0:0, the base I)");
  auto* exp = leaf(&app, "export", "spec and stage data as JSON", true, [&](std::ostream& s) { cmd_export(o, s); });
  exp->add_option("--stages", o.stages, "last stage to include");

  auto* diag = app.add_subcommand("diag", "ergodicity diagnostics");
  diag->require_subcommand(1);
  auto* wre = leaf(diag, "wre", "weak rational ergodicity ratio", true,
                   [&](std::ostream& s) { cmd_diag_wre(o, s, curve, kappa_list); });
  wre->add_option("--a", o.a, "level set A");
  wre->add_option("--b", o.b, "level set B (default A)");
  wre->add_option("--n", o.n, "number of terms");
  wre->add_flag("--curve", curve, "evaluate at kappa(1..m-max)");
  wre->add_option("--m-max", o.m_max, "last kappa mark for --curve");
  wre->add_option("--kappa-list", kappa_list, "evaluate at these n instead, comma separated");
  auto* rwm = leaf(diag, "rwm", "rational weak mixing deviation", true, [&](std::ostream& s) { cmd_diag_rwm(o, s); });
  rwm->add_option("--a", o.a, "level set A");
  rwm->add_option("--b", o.b, "level set B (default A)");
  rwm->add_option("--n", o.n, "number of terms");
  auto* renyi = leaf(diag, "renyi", "Renyi ratio of the ergodic sums", true,
                     [&](std::ostream& s) { cmd_diag_renyi(o, s, curve); });
  renyi->add_option("--n", o.n, "number of terms");
  renyi->add_flag("--curve", curve, "evaluate at kappa(1..m-max)");
  renyi->add_option("--m-max", o.m_max, "last kappa mark for --curve");
  auto* bre = leaf(diag, "bre", "bounded rational ergodicity sup profile", true, [&](std::ostream& s) { cmd_diag_bre(o, s); });
  bre->add_option("--n", o.n, "number of terms");
  bre->add_option("--m", o.m, "column whose levels are scanned");
  auto* zt = leaf(diag, "zerotype", "window maxima of mu(I & T^k I)", true, [&](std::ostream& s) { cmd_diag_zerotype(o, s); });
  zt->add_option("--m-lo", o.m_lo, "first window");
  zt->add_option("--m-hi", o.m_hi, "one past the last window");
  auto* seq = leaf(diag, "seq", "sequence functionals of u", true, [&](std::ostream& s) { cmd_diag_seq(o, s); });
  seq->add_option("--mode", o.mode, "small_set_ratio, strong_cesaro, asymptotic or smooth");
  seq->add_option("--n", o.n, "number of terms");
  seq->add_option("--a", o.a, "level set whose u series is used");
  seq->add_option("--b", o.b, "second level set (v for asymptotic, x for strong_cesaro)");
  seq->add_option("--index-set", o.index_set, "K for small_set_ratio, comma separated");
  seq->add_option("--level", o.level, "L for strong_cesaro, p/q");

  auto* recur = app.add_subcommand("recur", "multiple recurrence");
  recur->require_subcommand(1);
  auto* wit = leaf(recur, "witness", "search for n with mu(A & T^n A & ... & T^kn A) > 0", true,
                   [&](std::ostream& s) { cmd_recur_witness(o, s); });
  wit->add_option("--a", o.a, "level set A");
  wit->add_option("--k", o.k, "recurrence order");
  wit->add_option("--budget", o.budget, "number of candidates to try");
  auto* cert = leaf(recur, "certify", "certify non-recurrence of I up to a bound", true,
                    [&](std::ostream& s) { cmd_recur_certify(o, s); });
  cert->add_option("--k", o.k, "recurrence order");
  cert->add_option("--bound", o.bound, "largest n checked");

  auto* orbit = app.add_subcommand("orbit", "symbolic orbits of points");
  orbit->require_subcommand(1);
  auto point_opts = [&](CLI::App* sub) {
    sub->add_option("--stage", o.stage, "resolution stage m");
    sub->add_option("--height", o.height, "level of C_m");
    sub->add_option("--digits", o.digits, "copy indices for stages m, m+1, ..., comma separated");
  };
  auto* apply = leaf(orbit, "apply", "apply T^steps to a point", true, [&](std::ostream& s) { cmd_orbit_apply(o, s); });
  point_opts(apply);
  apply->add_option("--steps", o.steps, "signed number of steps");
  auto* visits = leaf(orbit, "visits", "count visits to a level set", true, [&](std::ostream& s) { cmd_orbit_visits(o, s); });
  point_opts(visits);
  visits->add_option("--target", o.target, "level set j:h1,h2,...");
  visits->add_option("--from", o.from, "first k");
  visits->add_option("--to", o.to, "last k");
  auto* cov = leaf(orbit, "coverage", "covering counts over one stage", true, [&](std::ostream& s) { cmd_orbit_coverage(o, s); });
  cov->add_option("--m", o.m, "stage");
  cov->add_option("--policy", o.policy, "zeros, max or random");
  cov->add_option("--extra", o.extra, "digits supplied up front");

  auto* wt = app.add_subcommand("wt", "weak topology on dyadic permutations");
  wt->require_subcommand(1);
  auto* dist = leaf(wt, "dist", "truncated weak-topology distance", false, [&](std::ostream& s) { cmd_wt_dist(o, s); });
  dist->add_option("--s", o.map_s, "map S as {\"k\":..,\"perm\":[..]}")->required();
  dist->add_option("--t", o.map_t, "map T as {\"k\":..,\"perm\":[..]}")->required();
  dist->add_option("--truncation", o.truncation, "number of sets A_i summed");
  auto* cyc = leaf(wt, "cyclic", "check or sample a cyclic permutation", false, [&](std::ostream& s) { cmd_wt_cyclic(o, s); });
  cyc->add_option("--map", o.map, "map to check; omitted means a random cyclic map of --rank");
  cyc->add_option("--rank", o.rank, "rank k of the random map");
  auto* pm = leaf(wt, "partmetrics", "rho, P and P_T on a seeded random instance", false,
                  [&](std::ostream& s) { cmd_wt_partmetrics(o, s); });
  pm->add_option("--rank", o.rank, "rank k of the cyclic map");
  pm->add_option("--column-height", o.column_height, "levels of C");
  pm->add_option("--d-height", o.d_height, "levels of D");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (!action) throw Error(ErrorKind::InvalidArgument, "no command given");
    if (o.output.empty()) {
      action(out);
    } else {
      std::ostringstream buf;
      action(buf);
      std::ofstream file(o.output, std::ios::binary);
      if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write " + o.output);
      file << buf.str();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace rankone::cli
