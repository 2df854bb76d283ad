#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>

#include "json.hpp"
#include "qfa/automaton.hpp"

namespace qfa {

// Spec dump format: the interchange contract between builders, the CLI and
// tests. Top-level fields: model, num_states, initial, partition
// {accepting, rejecting, nonhalting}, columns keyed by symbol name
// ("LEFT_END", "0", "1", "SHARP", "RIGHT_END") with entries
// {source, target, re[, im]} ("im" is omitted for the classical model),
// and state_names as an id -> string table.

namespace detail {
inline void entry_to_json(nlohmann::json& j, StateId source,
                          const std::complex<double>& amp) {
  j.push_back({{"source", source}, {"target", 0}, {"re", amp.real()}, {"im", amp.imag()}});
}
inline void entry_to_json(nlohmann::json& j, StateId source, double amp) {
  j.push_back({{"source", source}, {"target", 0}, {"re", amp}});
}
}  // namespace detail

template <typename Amp>
nlohmann::json spec_to_json(const MachineSpec<Amp>& spec) {
  nlohmann::json j;
  j["model"] = std::is_same_v<Amp, double> ? "classical" : "quantum";
  j["num_states"] = spec.num_states;
  j["initial"] = spec.initial;
  j["partition"] = {{"accepting", spec.partition.accepting},
                    {"rejecting", spec.partition.rejecting},
                    {"nonhalting", spec.partition.nonhalting}};
  nlohmann::json cols = nlohmann::json::object();
  for (int si = 0; si < kNumSymbols; ++si) {
    const Symbol symbol = static_cast<Symbol>(si);
    nlohmann::json list = nlohmann::json::array();
    for (StateId src = 0; src < spec.num_states; ++src)
      for (const auto& e : spec.column(symbol, src)) {
        detail::entry_to_json(list, src, e.amplitude);
        list.back()["target"] = e.target;
      }
    cols[symbol_name(symbol)] = std::move(list);
  }
  j["columns"] = std::move(cols);
  nlohmann::json names = nlohmann::json::object();
  for (StateId id = 0; id < spec.num_states; ++id)
    names[std::to_string(id)] = spec.state_names[id];
  j["state_names"] = std::move(names);
  return j;
}

namespace detail {
inline Symbol symbol_from_name(const std::string& name) {
  for (int si = 0; si < kNumSymbols; ++si)
    if (name == symbol_name(static_cast<Symbol>(si))) return static_cast<Symbol>(si);
  throw std::invalid_argument("spec dump: unknown symbol key \"" + name + "\"");
}

template <typename Amp>
MachineSpec<Amp> spec_from_json_impl(const nlohmann::json& j) {
  MachineSpec<Amp> spec;
  spec.init(j.at("num_states").get<int>());
  spec.initial = j.at("initial").get<StateId>();
  const auto& part = j.at("partition");
  spec.partition.accepting = part.at("accepting").get<std::vector<StateId>>();
  spec.partition.rejecting = part.at("rejecting").get<std::vector<StateId>>();
  spec.partition.nonhalting = part.at("nonhalting").get<std::vector<StateId>>();
  spec.rebuild_class_cache();
  if (j.contains("state_names"))
    for (const auto& [key, value] : j.at("state_names").items()) {
      const int id = std::stoi(key);
      if (id >= 0 && id < spec.num_states)
        spec.state_names[id] = value.template get<std::string>();
    }
  // Group flat entry lists back into per-source columns.
  for (const auto& [key, list] : j.at("columns").items()) {
    const Symbol symbol = symbol_from_name(key);
    std::vector<typename MachineSpec<Amp>::Column> per_source(spec.num_states);
    for (const auto& item : list) {
      const StateId src = item.at("source").template get<StateId>();
      const StateId tgt = item.at("target").template get<StateId>();
      if (src < 0 || src >= spec.num_states || tgt < 0 || tgt >= spec.num_states)
        throw std::invalid_argument("spec dump: state id out of range in columns");
      Amp amp;
      if constexpr (std::is_same_v<Amp, double>)
        amp = item.at("re").template get<double>();
      else
        amp = std::complex<double>(item.at("re").template get<double>(),
                                   item.template value("im", 0.0));
      per_source[src].push_back({tgt, amp});
    }
    for (StateId src = 0; src < spec.num_states; ++src)
      if (!per_source[src].empty()) spec.set_column(symbol, src, std::move(per_source[src]));
  }
  return spec;
}
}  // namespace detail

inline bool json_is_quantum(const nlohmann::json& j) {
  if (j.contains("model")) {
    const std::string m = j.at("model").get<std::string>();
    if (m == "quantum") return true;
    if (m == "classical") return false;
    throw std::invalid_argument("spec dump: unknown model \"" + m + "\"");
  }
  // Fall back on entry shape for dumps written without the model field.
  for (const auto& [key, list] : j.at("columns").items())
    for (const auto& item : list)
      if (item.contains("im")) return true;
  return false;
}

inline QfaSpec qfa_from_json(const nlohmann::json& j) {
  return detail::spec_from_json_impl<std::complex<double>>(j);
}
inline PfaSpec pfa_from_json(const nlohmann::json& j) {
  return detail::spec_from_json_impl<double>(j);
}

using AnySpec = std::variant<QfaSpec, PfaSpec>;

inline AnySpec spec_from_json(const nlohmann::json& j) {
  if (json_is_quantum(j)) return qfa_from_json(j);
  return pfa_from_json(j);
}

template <typename Amp>
void save_spec(const std::string& path, const MachineSpec<Amp>& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << spec_to_json(spec).dump(2) << '\n';
}

inline AnySpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return spec_from_json(j);
}

}  // namespace qfa
