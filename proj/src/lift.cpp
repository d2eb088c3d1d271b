#include "mql/lift.hpp"

#include <algorithm>
#include <random>

namespace mql {

std::vector<CanonicalIndex> valid_indices(std::int64_t k_max) {
  std::vector<CanonicalIndex> out;
  for (int u = 0; (std::int64_t{1} << u) * 2 <= k_max; ++u) {
    const std::int64_t pow2 = std::int64_t{1} << u;
    for (std::int64_t n = 1; pow2 * n * n * 2 <= k_max; n += 2) {
      const std::int64_t step = pow2 * n * n;
      for (std::int64_t m = 2; step * m <= k_max; m += 4) out.push_back({step * m, u, n});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

FormalCoefficient lift_coefficient(const CanonicalIndex& index, int epsilon) {
  if (!index.is_valid()) throw std::invalid_argument("invalid index " + to_string(index));
  if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +1 or -1");
  FormalCoefficient out;
  const auto ds = divisors(index.n);
  Rational sign = 1;
  for (int t = 0; t <= index.u; ++t) {
    const std::int64_t denom2 = std::int64_t{1} << (t + 1);
    for (auto d : ds) {
      const std::int64_t denom = denom2 * d * d;
      if (index.K % denom != 0) throw std::logic_error("non-integral symbol in lift of " + to_string(index));
      out.add_term(index.K / denom, sign);
    }
    sign *= -epsilon;
  }
  return out;
}

FormalTable build_lift_table(int epsilon, std::int64_t k_max) {
  FormalTable table(epsilon, k_max);
  for (const auto& idx : valid_indices(k_max)) table.set(idx, lift_coefficient(idx, epsilon));
  return table;
}

NumericTable build_lift_table(const Assignment& values, std::int64_t k_max) {
  NumericTable table(values.epsilon, k_max);
  for (const auto& idx : valid_indices(k_max)) table.set(idx, eval(lift_coefficient(idx, values.epsilon), values));
  return table;
}

AnyTable build_lift_table(const SourceForm& f, std::int64_t k_max) {
  if (f.values) {
    Assignment a = *f.values;
    a.epsilon = f.epsilon;
    return build_lift_table(a, k_max);
  }
  return build_lift_table(f.epsilon, k_max);
}

int u_of_N(std::int64_t N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  int a = 0;
  while (N % 4 == 0) {
    N /= 4;
    ++a;
  }
  return N % 2 == 1 ? 2 * a : 2 * a + 1;
}

ExactTable maass_table_from_generators(int epsilon, std::int64_t k_max,
                                       const std::function<Rational(const CanonicalIndex&)>& free_value,
                                       bool enforce_dyadic) {
  ExactTable table(epsilon, k_max);
  const Rational dyadic1(-3 * epsilon, 2);
  const Rational dyadic2(-1, 2);
  // Ascending (K, u, n) order guarantees every reference is already filled:
  // 2a looks at smaller K, 2b at smaller K or at (K, u, 1) which sorts first.
  for (const auto& idx : valid_indices(k_max)) {
    Rational value;
    if (idx.n > 1) {
      for (auto d : divisors(idx.n)) value += table.at(idx.K / (d * d), idx.u, 1);
    } else if (idx.u == 0 || !enforce_dyadic) {
      value = free_value(idx);
    } else {
      value = dyadic1 * table.at(idx.K / 2, idx.u - 1, 1);
      if (idx.u >= 2) value += dyadic2 * table.at(idx.K / 4, idx.u - 2, 1);
    }
    table.set(idx, std::move(value));
  }
  return table;
}

ExactTable random_maass_table(int epsilon, std::uint64_t seed, std::int64_t k_max, bool enforce_dyadic) {
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const CanonicalIndex&) {
    const auto num = static_cast<long>(rng() % 201) - 100;
    const auto den = static_cast<long>(rng() % 16) + 1;
    Rational r(num, den);
    r.canonicalize();
    return r;
  };
  return maass_table_from_generators(epsilon, k_max, draw, enforce_dyadic);
}

NumericTable to_numeric(const ExactTable& table) {
  NumericTable out(table.epsilon(), table.k_max());
  for (const auto& [idx, v] : table.entries()) out.set(idx, v.get_d());
  return out;
}

NumericTable to_numeric(const FormalTable& table, const Assignment& values) {
  NumericTable out(table.epsilon(), table.k_max());
  for (const auto& [idx, v] : table.entries()) out.set(idx, eval(v, values));
  return out;
}

NumericTable to_numeric(const AnyTable& table) {
  return std::visit(
      [](const auto& t) -> NumericTable {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, NumericTable>) {
          return t;
        } else if constexpr (std::is_same_v<T, ExactTable>) {
          return to_numeric(t);
        } else {
          throw std::invalid_argument("a formal table needs values for its symbols before numeric use");
        }
      },
      table);
}

namespace {

template <class V>
json value_to_json(const V& v) {
  if constexpr (std::is_same_v<V, double>) {
    return v;
  } else if constexpr (std::is_same_v<V, Rational>) {
    return to_string(v);
  } else {
    return to_json(v);
  }
}

template <class V>
V value_from_json(const json& j);

template <>
double value_from_json<double>(const json& j) {
  if (!j.is_number()) throw std::invalid_argument("numeric value expected");
  return j.get<double>();
}

template <>
Rational value_from_json<Rational>(const json& j) {
  if (!j.is_string()) throw std::invalid_argument("exact value must be a \"p/q\" string");
  return parse_rational(j.get<std::string>());
}

template <>
FormalCoefficient value_from_json<FormalCoefficient>(const json& j) {
  return formal_from_json(j);
}

template <class V>
AnyTable read_entries(const json& j, int epsilon, std::int64_t k_max) {
  CoefficientTable<V> table(epsilon, k_max);
  const auto& entries = j.at("entries");
  if (!entries.is_array()) throw std::invalid_argument("\"entries\" must be an array");
  std::size_t row = 0;
  for (const auto& e : entries) {
    try {
      CanonicalIndex idx{e.at("K").get<std::int64_t>(), e.at("u").get<int>(), e.at("n").get<std::int64_t>()};
      if (table.find(idx)) throw std::invalid_argument("duplicate index " + to_string(idx));
      table.set(idx, value_from_json<V>(e.at("value")));
    } catch (const std::exception& ex) {
      throw std::invalid_argument("table entry #" + std::to_string(row) + ": " + ex.what());
    }
    ++row;
  }
  if (!table.is_complete()) {
    for (const auto& idx : valid_indices(k_max)) {
      if (!table.find(idx)) throw std::invalid_argument("table is missing entry " + to_string(idx));
    }
  }
  return table;
}

}  // namespace

json to_json(const MaassReport& r) {
  json j;
  j["checked_2a"] = r.checked_2a;
  j["checked_2b"] = r.checked_2b;
  json f2a = json::array();
  for (const auto& idx : r.failures_2a) f2a.push_back(to_string(idx));
  json f2b = json::array();
  for (const auto& idx : r.failures_2b) f2b.push_back(to_string(idx));
  j["failures_2a"] = std::move(f2a);
  j["failures_2b"] = std::move(f2b);
  j["max_rel_err"] = r.max_rel_err;
  j["pass"] = r.pass();
  return j;
}

json to_json(const AnyTable& table) {
  return std::visit(
      [](const auto& t) {
        using V = typename std::decay_t<decltype(t)>::value_type;
        json j;
        j["backend"] = ValueOps<V>::backend;
        j["epsilon"] = t.epsilon();
        j["kmax"] = t.k_max();
        json entries = json::array();
        for (const auto& [idx, v] : t.entries()) {
          json e;
          e["K"] = idx.K;
          e["u"] = idx.u;
          e["n"] = idx.n;
          e["value"] = value_to_json(v);
          entries.push_back(std::move(e));
        }
        j["entries"] = std::move(entries);
        return j;
      },
      table);
}

AnyTable table_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("table file must hold a JSON object");
  const auto backend = j.at("backend").get<std::string>();
  const int epsilon = j.at("epsilon").get<int>();
  const auto k_max = j.at("kmax").get<std::int64_t>();
  if (backend == "formal") return read_entries<FormalCoefficient>(j, epsilon, k_max);
  if (backend == "exact") return read_entries<Rational>(j, epsilon, k_max);
  if (backend == "numeric") return read_entries<double>(j, epsilon, k_max);
  throw std::invalid_argument("unknown backend \"" + backend + "\"");
}

}  // namespace mql
