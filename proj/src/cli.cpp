#include "mql/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

#include "mql/arith.hpp"
#include "mql/enumerate.hpp"
#include "mql/hecke.hpp"
#include "mql/hurwitz.hpp"
#include "mql/lattice.hpp"
#include "mql/lift.hpp"
#include "mql/spectral.hpp"

namespace mql::cli {

namespace {

std::int64_t parse_int(const std::string& text, const std::string& what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError(what + ": expected an integer, got \"" + text + "\"");
  }
  return v;
}

std::int64_t prime_key(const std::string& key, const std::string& where) {
  const auto p = parse_int(key, where);
  if (!is_prime(p)) throw InputError(where + ": " + key + " is not a prime");
  return p;
}

std::map<std::int64_t, double> parse_lambdas(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object {\"p\": lambda_p, ...}");
  std::map<std::int64_t, double> out;
  for (const auto& [key, val] : j.items()) {
    const auto p = prime_key(key, where);
    if (p == 2) throw InputError(where + ": lambda is only used at odd primes, got key 2");
    if (!val.is_number()) throw InputError(where + "[\"" + key + "\"]: expected a number");
    out[p] = val.get<double>();
  }
  return out;
}

template <class T>
T get_key(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key \"") + key + "\": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("\"" + path + "\" is not valid JSON: " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  RunConfig c;
  c.raw = j;
  if (j.contains("epsilon")) c.epsilon = get_key<int>(j, "epsilon");
  if (j.contains("lambdas")) c.lambdas = parse_lambdas(j.at("lambdas"), "config key \"lambdas\"");
  if (j.contains("kmax")) c.k_max = get_key<std::int64_t>(j, "kmax");
  if (j.contains("nmax")) c.n_max = get_key<std::int64_t>(j, "nmax");
  if (j.contains("backend")) c.backend = get_key<std::string>(j, "backend");
  if (j.contains("tolerance")) c.tolerance = get_key<double>(j, "tolerance");
  if (j.contains("seed")) c.seed = get_key<std::uint64_t>(j, "seed");
  if (c.epsilon != 1 && c.epsilon != -1) throw InputError("config key \"epsilon\": must be +1 or -1");
  if (c.k_max < 2) throw InputError("config key \"kmax\": must be at least 2");
  if (c.n_max < 0) throw InputError("config key \"nmax\": must be non-negative");
  if (!(c.tolerance > 0)) throw InputError("config key \"tolerance\": must be positive");
  if (c.backend != "formal" && c.backend != "numeric") {
    throw InputError("config key \"backend\": expected formal or numeric, got \"" + c.backend + "\"");
  }
  return c;
}

const std::vector<std::string>& engine_operations() {
  static const std::vector<std::string> ops = {
      "arith",           "is_in_S",          "is_primitive",       "canonical_decompose", "find_representative",
      "enumerate_norm",  "enumerate_cp",     "divide_exact",       "lemma51_count",       "combine",
      "eval",            "reduce_eigen2",    "lift_coefficient",   "build_lift_table",    "u_of_N",
      "invert_cN",       "check_maass",      "random_maass_table", "apply",               "extract_lambda",
      "verify_eigen_relations", "stability_check", "adjoint_matrix_identities", "synth_eigenform",
      "satake_from_lambda", "ramanujan_violation_check", "sigma_descriptor", "verify_cn_relations"};
  return ops;
}

const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = {
      {"arith", "arith X [OP Y [SIDE]]",
       "Norm, trace, conjugate and lattice membership of X; with OP in + - * / also the result of X OP Y "
       "(/ divides on SIDE left or right, default right)",
       {"arith", "is_in_S", "is_primitive", "divide_exact"}},
      {"decompose", "decompose [ELEMENT...]", "Canonical index (K,u,n) and primitive part of lattice elements",
       {"canonical_decompose", "is_primitive"}},
      {"represent", "represent K u n", "Deterministic representative of a canonical index", {"find_representative"}},
      {"enum-norm", "enum-norm M", "All Hurwitz quaternions of reduced norm M", {"enumerate_norm"}},
      {"cp-enum", "cp-enum P", "Representatives of norm-P elements modulo right units", {"enumerate_cp"}},
      {"lemma51", "lemma51 BETA P", "Divisibility counts of a primitive element against C_P", {"lemma51_count"}},
      {"formal", "formal combine A B S T | formal eval A | formal reduce A",
       "Formal coefficient algebra on JSON objects {\"M\": \"p/q\"}; eval reads config \"values\"",
       {"combine", "eval", "reduce_eigen2"}},
      {"lift", "lift", "Lift table of the configured source form (formal or numeric backend)",
       {"lift_coefficient", "build_lift_table", "eval", "synth_eigenform"}},
      {"random-table", "random-table", "Seeded random Maass-space table (exact rationals)", {"random_maass_table"}},
      {"invert", "invert TABLE", "Recover c(-N) from a table", {"u_of_N", "invert_cN"}},
      {"check-maass", "check-maass TABLE", "Check both Maass recurrences", {"check_maass", "reduce_eigen2"}},
      {"hecke", "hecke TABLE [--mode eigen|image] [--op KIND --prime P]",
       "Eigenvalue relations of a table, or its image under one operator", {"apply", "verify_eigen_relations"}},
      {"extract-lambda", "extract-lambda TABLE", "Hecke eigenvalues lambda_p of the source form", {"extract_lambda"}},
      {"synth", "synth", "Coefficients of a synthetic eigenform", {"synth_eigenform"}},
      {"satake", "satake [LAMBDA_FILE]", "Satake parameters as CSV; --report writes the violation report",
       {"satake_from_lambda", "ramanujan_violation_check"}},
      {"descriptor", "descriptor [PLACE...]", "Local component descriptors at primes and inf", {"sigma_descriptor"}},
      {"stability", "stability", "Hecke stability of seeded random Maass tables",
       {"random_maass_table", "stability_check", "check_maass"}},
      {"adjoint", "adjoint", "Adjoint double-coset matrix identities", {"adjoint_matrix_identities"}},
      {"cn-check", "cn-check TABLE", "Recursions of the recovered c(-N)", {"verify_cn_relations", "invert_cN"}},
      {"suite", "suite --out DIR", "Run every command on the configuration and write the artifacts to DIR", {}},
  };
  return table;
}

namespace {

struct Context {
  RunConfig cfg;
  std::vector<std::string> args;
  std::optional<std::string> op;
  std::optional<std::int64_t> prime;
  std::string mode = "eigen";
  std::optional<std::string> report_path;
};

/// One command's outcome: the primary artifact plus the exit status.
struct Result {
  std::string text;
  int status = 0;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Result ok_if(const json& j, bool pass) { return {dump(j), pass ? 0 : 1}; }

const std::string& arg(const Context& ctx, std::size_t k, const std::string& what) {
  if (k >= ctx.args.size()) throw InputError("missing argument: " + what);
  return ctx.args[k];
}

HurwitzQuaternion parse_element(const std::string& text, const std::string& where) {
  try {
    return parse_quaternion(text);
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
}

AnyTable load_table(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return table_from_json(j);
  } catch (const std::exception& e) {
    throw InputError("\"" + path + "\": " + e.what());
  }
}

NumericTable numeric_table(const AnyTable& t) {
  if (std::holds_alternative<FormalTable>(t)) {
    throw InputError("a formal table has no numeric values; lift with --backend numeric");
  }
  return to_numeric(t);
}

std::map<std::int64_t, double> lambdas_for(const RunConfig& cfg, std::int64_t n_max) {
  auto lambdas = random_lambdas(cfg.seed, n_max);
  for (const auto& [p, l] : cfg.lambdas) lambdas[p] = l;
  return lambdas;
}

std::vector<std::int64_t> config_primes(const Context& ctx, std::vector<std::int64_t> fallback) {
  if (ctx.prime) return {*ctx.prime};
  if (!ctx.cfg.raw.contains("primes")) return fallback;
  const auto& j = ctx.cfg.raw.at("primes");
  if (!j.is_array()) throw InputError("config key \"primes\": expected an array");
  std::vector<std::int64_t> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number_integer() || !is_prime(j[k].get<std::int64_t>())) {
      throw InputError("config key \"primes\" entry #" + std::to_string(k) + ": expected a prime");
    }
    out.push_back(j[k].get<std::int64_t>());
  }
  return out;
}

json quaternion_json(const HurwitzQuaternion& q) {
  json j;
  j["value"] = to_string(q);
  j["doubled"] = q.doubled();
  return j;
}

Result cmd_arith(const Context& ctx) {
  const auto x = parse_element(arg(ctx, 0, "X"), "X");
  json j;
  j["x"] = to_string(x);
  j["norm"] = x.reduced_norm();
  j["trace"] = x.reduced_trace();
  j["conjugate"] = to_string(x.conjugate());
  j["in_S"] = is_in_S(x);
  if (auto s = LatticeElement::make(x); s && !x.is_zero()) j["primitive"] = is_primitive(*s);
  if (ctx.args.size() >= 3) {
    const std::string& op = ctx.args[1];
    const auto y = parse_element(ctx.args[2], "Y");
    j["op"] = op;
    j["y"] = to_string(y);
    if (op == "+") {
      j["result"] = to_string(x + y);
    } else if (op == "-") {
      j["result"] = to_string(x - y);
    } else if (op == "*") {
      j["result"] = to_string(x * y);
    } else if (op == "/") {
      if (y.is_zero()) throw InputError("Y: division by zero");
      const std::string side = ctx.args.size() >= 4 ? ctx.args[3] : "right";
      if (side != "left" && side != "right") throw InputError("SIDE: expected left or right, got \"" + side + "\"");
      const auto q = divide_exact(x, y, side == "left" ? Side::Left : Side::Right);
      j["side"] = side;
      j["result"] = q ? json(to_string(*q)) : json("not divisible");
    } else {
      throw InputError("OP: expected one of + - * /, got \"" + op + "\"");
    }
  } else if (ctx.args.size() == 2) {
    throw InputError("missing argument: Y");
  }
  return {dump(j), 0};
}

Result cmd_decompose(const Context& ctx) {
  std::vector<std::string> inputs = ctx.args;
  if (inputs.empty() && ctx.cfg.raw.contains("elements")) {
    const auto& e = ctx.cfg.raw.at("elements");
    if (!e.is_array()) throw InputError("config key \"elements\": expected an array");
    for (const auto& v : e) inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  if (inputs.empty()) throw InputError("decompose needs at least one element");
  json out = json::array();
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const std::string where = "element #" + std::to_string(k) + " \"" + inputs[k] + "\"";
    const auto q = parse_element(inputs[k], where);
    Decomposition d{{}, LatticeElement(HurwitzQuaternion::from_integer(1, 1, 0, 0))};
    try {
      d = canonical_decompose(q);
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }
    json j;
    j["input"] = inputs[k];
    j["K"] = d.index.K;
    j["u"] = d.index.u;
    j["n"] = d.index.n;
    j["primitive"] = to_string(d.primitive.value());
    out.push_back(std::move(j));
  }
  return {dump(out), 0};
}

Result cmd_represent(const Context& ctx) {
  const CanonicalIndex idx{parse_int(arg(ctx, 0, "K"), "K"), static_cast<int>(parse_int(arg(ctx, 1, "u"), "u")),
                           parse_int(arg(ctx, 2, "n"), "n")};
  if (!idx.is_valid()) throw InputError("no representative exists for index " + to_string(idx));
  const auto beta = find_representative(idx);
  json j;
  j["K"] = idx.K;
  j["u"] = idx.u;
  j["n"] = idx.n;
  j["representative"] = to_string(beta.value());
  return {dump(j), 0};
}

Result cmd_enum_norm(const Context& ctx) {
  const auto m = parse_int(arg(ctx, 0, "M"), "M");
  if (m < 1) throw InputError("M must be positive");
  json out = json::array();
  for (const auto& q : enumerate_norm(m)) out.push_back(quaternion_json(q));
  return {dump(out), 0};
}

Result cmd_cp_enum(const Context& ctx) {
  std::int64_t p = 0;
  if (!ctx.args.empty()) {
    p = parse_int(ctx.args[0], "P");
  } else if (ctx.prime) {
    p = *ctx.prime;
  } else {
    throw InputError("missing argument: P");
  }
  if (p == 2 || !is_prime(p)) throw InputError("P must be an odd prime, got " + std::to_string(p));
  json out = json::array();
  for (const auto& q : enumerate_cp(p)) out.push_back(quaternion_json(q));
  return {dump(out), 0};
}

Result cmd_lemma51(const Context& ctx) {
  const auto q = parse_element(arg(ctx, 0, "BETA"), "BETA");
  const auto p = parse_int(arg(ctx, 1, "P"), "P");
  if (p == 2 || !is_prime(p)) throw InputError("P must be an odd prime, got " + std::to_string(p));
  const auto s = LatticeElement::make(q);
  if (!s || !is_primitive(*s)) throw InputError("BETA: " + to_string(q) + " is not primitive");
  const auto c = lemma51_count(*s, p);
  const int expected = s->norm() % p == 0 ? 1 : 0;
  json j;
  j["beta"] = to_string(q);
  j["p"] = p;
  j["left"] = c.left;
  j["right"] = c.right;
  j["square_divides"] = c.square_divides;
  j["expected"] = expected;
  const bool pass = c.left == expected && c.right == expected && !c.square_divides;
  j["pass"] = pass;
  return ok_if(j, pass);
}

FormalCoefficient formal_arg(const std::string& text, const std::string& where) {
  try {
    return formal_from_json(json::parse(text));
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

Rational rational_arg(const std::string& text, const std::string& where) {
  try {
    return parse_rational(text);
  } catch (const std::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

Result cmd_formal(const Context& ctx) {
  const std::string& what = arg(ctx, 0, "combine|eval|reduce");
  if (what == "combine") {
    const auto a = formal_arg(arg(ctx, 1, "A"), "A");
    const auto b = formal_arg(arg(ctx, 2, "B"), "B");
    const auto s = rational_arg(arg(ctx, 3, "S"), "S");
    const auto t = rational_arg(arg(ctx, 4, "T"), "T");
    return {dump(to_json(combine(a, b, s, t))), 0};
  }
  if (what == "reduce") return {dump(to_json(reduce_eigen2(formal_arg(arg(ctx, 1, "A"), "A"), ctx.cfg.epsilon))), 0};
  if (what == "eval") {
    const auto a = formal_arg(arg(ctx, 1, "A"), "A");
    Assignment values;
    values.epsilon = ctx.cfg.epsilon;
    if (ctx.cfg.raw.contains("values")) {
      const auto& v = ctx.cfg.raw.at("values");
      if (!v.is_object()) throw InputError("config key \"values\": expected an object");
      for (const auto& [key, val] : v.items()) {
        if (!val.is_number()) throw InputError("config key \"values\"[\"" + key + "\"]: expected a number");
        values.values[parse_int(key, "config key \"values\"")] = val.get<double>();
      }
    }
    try {
      json j;
      j["value"] = eval(a, values);
      return {dump(j), 0};
    } catch (const UnassignedSymbol& e) {
      throw InputError(e.what());
    }
  }
  throw InputError("formal: expected combine, eval or reduce, got \"" + what + "\"");
}

AnyTable lift_table(const RunConfig& cfg) {
  if (cfg.backend == "formal") return build_lift_table(cfg.epsilon, cfg.k_max);
  Assignment values;
  values.epsilon = cfg.epsilon;
  if (cfg.raw.contains("coefficients")) {
    const auto& c = cfg.raw.at("coefficients");
    if (!c.is_object()) throw InputError("config key \"coefficients\": expected an object {\"M\": c(-M)}");
    for (const auto& [key, val] : c.items()) {
      if (!val.is_number()) throw InputError("config key \"coefficients\"[\"" + key + "\"]: expected a number");
      values.values[parse_int(key, "config key \"coefficients\"")] = val.get<double>();
    }
  } else {
    const auto n_max = std::max<std::int64_t>(1, cfg.k_max / 2);
    values = synth_eigenform(cfg.epsilon, lambdas_for(cfg, n_max), n_max).assignment();
  }
  try {
    return build_lift_table(values, cfg.k_max);
  } catch (const UnassignedSymbol& e) {
    throw InputError(std::string("config key \"coefficients\": ") + e.what());
  }
}

Result cmd_lift(const Context& ctx) { return {dump(to_json(lift_table(ctx.cfg))), 0}; }

bool enforce_dyadic(const RunConfig& cfg) {
  return cfg.raw.contains("enforce_dyadic") ? get_key<bool>(cfg.raw, "enforce_dyadic") : true;
}

Result cmd_random_table(const Context& ctx) {
  const auto t = random_maass_table(ctx.cfg.epsilon, ctx.cfg.seed, ctx.cfg.k_max, enforce_dyadic(ctx.cfg));
  return {dump(to_json(AnyTable(t))), 0};
}

Result cmd_invert(const Context& ctx) {
  const auto table = load_table(arg(ctx, 0, "TABLE"));
  json out = json::array();
  std::visit(
      [&](const auto& t) {
        using V = typename std::decay_t<decltype(t)>::value_type;
        const std::int64_t n_max = std::min(ctx.cfg.effective_n_max(), t.k_max() / 2);
        for (std::int64_t N = 1; N <= n_max; ++N) {
          const V v = invert_cN(t, N);
          json j;
          j["N"] = N;
          j["u"] = u_of_N(N);
          if constexpr (std::is_same_v<V, double>) {
            j["value"] = v;
          } else if constexpr (std::is_same_v<V, Rational>) {
            j["value"] = to_string(v);
          } else {
            j["value"] = to_json(v);
          }
          out.push_back(std::move(j));
        }
      },
      table);
  return {dump(out), 0};
}

Result cmd_check_maass(const Context& ctx) {
  const auto table = load_table(arg(ctx, 0, "TABLE"));
  const auto report = std::visit([&](const auto& t) { return check_maass(t, ctx.cfg.tolerance); }, table);
  return ok_if(to_json(report), report.pass());
}

std::map<std::int64_t, double> config_lambdas_only(const RunConfig& cfg) { return cfg.lambdas; }

Result cmd_hecke(const Context& ctx) {
  const auto table = numeric_table(load_table(arg(ctx, 0, "TABLE")));
  if (ctx.mode == "image") {
    if (!ctx.op || !ctx.prime) throw InputError("--mode image needs --op and --prime");
    HeckeOperator op;
    try {
      op = HeckeOperator::make(*ctx.prime, parse_hecke_kind(*ctx.op));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    return {dump(to_json(AnyTable(hecke_image(op, table)))), 0};
  }
  if (ctx.mode != "eigen") throw InputError("--mode: expected eigen or image, got \"" + ctx.mode + "\"");
  const auto primes = config_primes(ctx, {2, 3, 5});
  const auto reports = verify_eigen_relations(table, {primes.begin(), primes.end()}, ctx.cfg.tolerance,
                                              config_lambdas_only(ctx.cfg));
  json j;
  json arr = json::array();
  bool pass = !reports.empty();
  for (const auto& r : reports) {
    if (ctx.op && to_string(r.kind) != *ctx.op) continue;
    arr.push_back(to_json(r));
    pass = pass && r.pass;
  }
  j["reports"] = std::move(arr);
  j["pass"] = pass;
  return ok_if(j, pass);
}

Result cmd_extract_lambda(const Context& ctx) {
  const auto table = numeric_table(load_table(arg(ctx, 0, "TABLE")));
  json out = json::array();
  bool pass = true;
  for (auto p : config_primes(ctx, {3, 5, 7})) {
    if (p == 2) continue;  // no lambda at 2; the shared prime list may still name it
    json j;
    j["p"] = p;
    try {
      const auto est = extract_lambda_detail(table, p, std::max(ctx.cfg.tolerance * 0.1, 1e-12));
      j["lambda"] = est.value;
      j["bases"] = est.per_base.size();
      j["spread"] = est.spread;
    } catch (const std::runtime_error& e) {
      j["lambda"] = nullptr;
      j["error"] = e.what();
      pass = false;
    }
    out.push_back(std::move(j));
  }
  return ok_if(out, pass);
}

Result cmd_synth(const Context& ctx) {
  const auto n_max = ctx.cfg.effective_n_max();
  const auto f = synth_eigenform(ctx.cfg.epsilon, lambdas_for(ctx.cfg, n_max), n_max);
  json j;
  j["epsilon"] = f.epsilon;
  j["nmax"] = f.n_max;
  json lambdas = json::object();
  for (const auto& [p, l] : f.lambdas) lambdas[std::to_string(p)] = l;
  j["lambdas"] = std::move(lambdas);
  json coeffs = json::object();
  for (std::int64_t N = 1; N <= f.n_max; ++N) coeffs[std::to_string(N)] = f.c[N];
  j["coefficients"] = std::move(coeffs);
  return {dump(j), 0};
}

Result cmd_satake(const Context& ctx, std::string* report_text) {
  std::map<std::int64_t, double> lambdas = ctx.cfg.lambdas;
  if (!ctx.args.empty()) lambdas = parse_lambdas(read_json_file(ctx.args[0]), "\"" + ctx.args[0] + "\"");
  if (lambdas.empty()) {
    const auto primes = config_primes(ctx, {3, 5, 7});
    const auto drawn = random_lambdas(ctx.cfg.seed, primes.empty() ? 3 : primes.back());
    for (auto p : primes) {
      if (p != 2) lambdas[p] = drawn.at(p);
    }
  }
  std::vector<SatakeParams> rows;
  json reports = json::array();
  bool pass = true;
  for (const auto& [p, l] : lambdas) {
    rows.push_back(satake_from_lambda(p, l));
    const auto rep = ramanujan_violation_check(rows.back());
    const double rel = satake_relation_error(rows.back());
    const bool row_ok = rel <= 1e-12 && std::abs(rep.alpha_sum) <= 1e-10;
    pass = pass && row_ok;
    json j;
    j["p"] = p;
    j["lambda"] = l;
    j["v"] = rep.v;
    j["max_abs_v"] = rep.max_abs_v;
    j["bound"] = rep.bound;
    j["violated"] = rep.violated;
    j["alpha_sum"] = rep.alpha_sum;
    j["relation_error"] = rel;
    j["pass"] = row_ok;
    reports.push_back(std::move(j));
  }
  json report;
  report["modulus"] = "v_i = log_p of the complex modulus |chi_i(p)|";
  report["rows"] = std::move(reports);
  report["pass"] = pass;
  if (report_text) *report_text = dump(report);
  return {satake_csv(rows), pass ? 0 : 1};
}

Result cmd_descriptor(const Context& ctx) {
  std::vector<std::string> places = ctx.args;
  if (places.empty()) {
    places.push_back("2");
    for (const auto& [p, l] : ctx.cfg.lambdas) places.push_back(std::to_string(p));
    if (ctx.cfg.raw.contains("r")) places.push_back("inf");
  }
  json out = json::array();
  for (const auto& name : places) {
    DescriptorInputs in;
    Place place;
    if (name == "inf") {
      place = Place::infinity();
      if (!ctx.cfg.raw.contains("r")) throw InputError("place inf: config key \"r\" is missing");
      in.r = get_key<double>(ctx.cfg.raw, "r");
    } else {
      place = Place::finite(prime_key(name, "place"));
      if (place.p == 2) {
        in.epsilon = ctx.cfg.epsilon;
      } else {
        auto it = ctx.cfg.lambdas.find(place.p);
        if (it == ctx.cfg.lambdas.end()) throw InputError("place " + name + ": lambda_" + name + " is missing");
        in.lambda = it->second;
      }
    }
    try {
      out.push_back(to_json(sigma_descriptor(place, in)));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  return {dump(out), 0};
}

std::vector<HeckeOperator> config_operators(const RunConfig& cfg) {
  std::vector<std::string> names = {"T2@2", "H2@3", "H3@3", "H4@3"};
  if (cfg.raw.contains("operators")) names = get_key<std::vector<std::string>>(cfg.raw, "operators");
  std::vector<HeckeOperator> ops;
  for (const auto& n : names) {
    const auto at = n.find('@');
    if (at == std::string::npos) throw InputError("operator \"" + n + "\": expected KIND@P");
    try {
      ops.push_back(HeckeOperator::make(parse_int(n.substr(at + 1), "operator \"" + n + "\""),
                                        parse_hecke_kind(n.substr(0, at))));
    } catch (const std::invalid_argument& e) {
      throw InputError("operator \"" + n + "\": " + e.what());
    }
  }
  return ops;
}

Result cmd_stability(const Context& ctx) {
  const auto ops = config_operators(ctx.cfg);
  const std::int64_t count = ctx.cfg.raw.contains("tables") ? get_key<std::int64_t>(ctx.cfg.raw, "tables") : 1;
  if (count < 1) throw InputError("config key \"tables\": must be positive");
  json tables = json::array();
  bool pass = true;
  for (std::int64_t k = 0; k < count; ++k) {
    const std::uint64_t seed = ctx.cfg.seed + static_cast<std::uint64_t>(k);
    const auto exact = random_maass_table(ctx.cfg.epsilon, seed, ctx.cfg.k_max, enforce_dyadic(ctx.cfg));
    const auto input = check_maass(exact);
    const auto numeric = to_numeric(exact);
    json t;
    t["seed"] = seed;
    t["input"] = to_json(input);
    pass = pass && input.pass();
    json reports = json::array();
    for (const auto& op : ops) {
      try {
        const auto r = stability_check(numeric, op, ctx.cfg.tolerance);
        pass = pass && r.pass();
        reports.push_back(to_json(r));
      } catch (const OutOfBounds& e) {
        throw InputError(to_string(op) + ": " + e.what());
      }
    }
    t["reports"] = std::move(reports);
    tables.push_back(std::move(t));
  }
  json j;
  j["tables"] = std::move(tables);
  j["pass"] = pass;
  return ok_if(j, pass);
}

Result cmd_adjoint(const Context& ctx) {
  const auto primes = config_primes(ctx, {3, 5});
  std::vector<std::int64_t> odd;
  for (auto p : primes) {
    if (p != 2) odd.push_back(p);
  }
  const auto r = adjoint_matrix_identities(odd);
  return ok_if(to_json(r), r.pass());
}

Result cmd_cn_check(const Context& ctx) {
  const auto table = load_table(arg(ctx, 0, "TABLE"));
  const auto r = verify_cn_relations(table, ctx.cfg.lambdas, ctx.cfg.tolerance);
  return ok_if(to_json(r), r.pass());
}

using Handler = std::function<Result(const Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"arith", cmd_arith},
      {"decompose", cmd_decompose},
      {"represent", cmd_represent},
      {"enum-norm", cmd_enum_norm},
      {"cp-enum", cmd_cp_enum},
      {"lemma51", cmd_lemma51},
      {"formal", cmd_formal},
      {"lift", cmd_lift},
      {"random-table", cmd_random_table},
      {"invert", cmd_invert},
      {"check-maass", cmd_check_maass},
      {"hecke", cmd_hecke},
      {"extract-lambda", cmd_extract_lambda},
      {"synth", cmd_synth},
      {"descriptor", cmd_descriptor},
      {"stability", cmd_stability},
      {"adjoint", cmd_adjoint},
      {"cn-check", cmd_cn_check},
  };
  return h;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write \"" + path.string() + "\"");
  out << text;
}

/// Every command on one configuration; artifacts go to dir.
int run_suite(const Context& base, const std::filesystem::path& dir, std::ostream& log) {
  std::filesystem::create_directories(dir);
  int worst = 0;
  json summary = json::array();
  auto record = [&](const std::string& name, const std::string& file, const Result& r) {
    write_file(dir / file, r.text);
    worst = std::max(worst, r.status);
    json j;
    j["command"] = name;
    j["artifact"] = file;
    j["status"] = r.status;
    summary.push_back(std::move(j));
    log << name << " -> " << file << (r.status == 0 ? " ok" : " FAILED") << "\n";
  };
  auto with = [&](std::vector<std::string> args, auto&& tweak) {
    Context c = base;
    c.args = std::move(args);
    tweak(c);
    return c;
  };
  auto plain = [](Context&) {};

  record("arith", "arith.json", cmd_arith(with({"1+i", "*", "j+k"}, plain)));
  {
    Context c = with({}, plain);
    if (!c.cfg.raw.contains("elements")) c.args = {"1-ij", "2ij", "3-3ij"};
    record("decompose", "decompose.json", cmd_decompose(c));
  }
  record("represent", "represent.json", cmd_represent(with({"36", "1", "3"}, plain)));
  record("enum-norm", "enum-norm.json", cmd_enum_norm(with({"3"}, plain)));
  for (auto p : {3, 5, 7}) {
    record("cp-enum", "cp-enum-" + std::to_string(p) + ".json", cmd_cp_enum(with({std::to_string(p)}, plain)));
  }
  record("lemma51", "lemma51.json", cmd_lemma51(with({"2+i+j", "3"}, plain)));
  record("formal", "formal.json", cmd_formal(with({"reduce", R"({"4":"1","3":"2"})"}, plain)));

  const auto formal_path = dir / "lift-formal.json";
  const auto numeric_path = dir / "lift-numeric.json";
  const auto random_path = dir / "random-table.json";
  record("lift", "lift-formal.json", cmd_lift(with({}, [](Context& c) { c.cfg.backend = "formal"; })));
  record("lift", "lift-numeric.json", cmd_lift(with({}, [](Context& c) { c.cfg.backend = "numeric"; })));
  record("random-table", "random-table.json", cmd_random_table(with({}, plain)));
  record("invert", "invert.json", cmd_invert(with({formal_path.string()}, plain)));
  record("check-maass", "check-maass-formal.json", cmd_check_maass(with({formal_path.string()}, plain)));
  record("check-maass", "check-maass-random.json", cmd_check_maass(with({random_path.string()}, plain)));
  record("hecke", "hecke-eigen.json", cmd_hecke(with({numeric_path.string()}, plain)));
  record("hecke", "hecke-image.json", cmd_hecke(with({numeric_path.string()}, [](Context& c) {
           c.mode = "image";
           c.op = "H2";
           c.prime = 3;
         })));
  record("extract-lambda", "extract-lambda.json", cmd_extract_lambda(with({numeric_path.string()}, plain)));
  record("synth", "synth.json", cmd_synth(with({}, plain)));
  {
    std::string report;
    const Context c = with({}, plain);
    const auto r = cmd_satake(c, &report);
    record("satake", "satake.csv", r);
    write_file(dir / "satake-report.json", report);
  }
  record("descriptor", "descriptor.json", cmd_descriptor(with({}, [](Context& c) {
           if (!c.cfg.raw.contains("r")) c.cfg.raw["r"] = 2.0;
           c.cfg.lambdas = lambdas_for(c.cfg, 7);
         })));
  record("stability", "stability.json", cmd_stability(with({}, plain)));
  record("adjoint", "adjoint.json", cmd_adjoint(with({}, plain)));
  record("cn-check", "cn-check-numeric.json", cmd_cn_check(with({numeric_path.string()}, [](Context& c) {
           c.cfg.lambdas = lambdas_for(c.cfg, 7);
         })));
  record("cn-check", "cn-check-random.json", cmd_cn_check(with({random_path.string()}, plain)));

  json j;
  j["commands"] = std::move(summary);
  j["pass"] = worst == 0;
  write_file(dir / "summary.json", dump(j));
  return worst;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maass lift engine over the Hurwitz order", "mql"};
  app.require_subcommand(1);
  std::string config_path, out_path, backend;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> kmax;
  Context ctx;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_path, "Write the primary artifact here (a directory for suite)");
  app.add_option("--backend", backend, "formal or numeric")->check(CLI::IsMember({"formal", "numeric"}));
  app.add_option("--tolerance", tolerance, "Relative tolerance for numeric checks");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--kmax", kmax, "Largest K in coefficient tables");
  app.add_option("--op", ctx.op, "Hecke operator kind: T2, H2, H3, H4");
  app.add_option("--prime", ctx.prime, "Prime for --op, cp-enum and the eigen report");
  app.add_option("--mode", ctx.mode, "hecke: eigen or image");
  app.add_option("--report", ctx.report_path, "satake: write the violation report here");

  for (const auto& spec : command_table()) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    sub->fallthrough();
    sub->positionals_at_end(false);
    sub->add_option("args", ctx.args, spec.usage);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    json raw = json::object();
    if (!config_path.empty()) raw = read_json_file(config_path);
    ctx.cfg = parse_config(raw);
    if (!backend.empty()) ctx.cfg.backend = backend;
    if (tolerance) {
      if (!(*tolerance > 0)) throw InputError("--tolerance must be positive");
      ctx.cfg.tolerance = *tolerance;
    }
    if (seed) ctx.cfg.seed = *seed;
    if (kmax) {
      if (*kmax < 2) throw InputError("--kmax must be at least 2");
      ctx.cfg.k_max = *kmax;
    }

    if (command == "suite") {
      if (out_path.empty()) throw InputError("suite needs --out DIR");
      return run_suite(ctx, out_path, err) == 0 ? 0 : 1;
    }

    Result r;
    std::string report;
    if (command == "satake") {
      r = cmd_satake(ctx, &report);
    } else {
      r = handlers().at(command)(ctx);
    }
    if (out_path.empty()) {
      out << r.text;
    } else {
      write_file(out_path, r.text);
    }
    if (command == "satake" && ctx.report_path) write_file(*ctx.report_path, report);
    return r.status;
  } catch (const InputError& e) {
    err << "error: " << command << ": " << e.what() << "\n";
    return 2;
  } catch (const OutOfBounds& e) {
    err << "error: " << command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << command << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mql::cli
