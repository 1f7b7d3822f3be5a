#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>

namespace qmdp {

/// Counts generative-oracle invocations, split by backend kind and by phase.
///
/// Every charge lands in exactly one phase (the active one), so the phase
/// counters always sum to classical_samples + quantum_oracle_calls.
class QueryLedger {
 public:
  static constexpr const char* kDefaultPhase = "unattributed";

  void set_phase(std::string label) { phase_ = std::move(label); }
  const std::string& phase() const noexcept { return phase_; }

  void charge_classical(std::uint64_t n);
  void charge_quantum(std::uint64_t n);

  std::uint64_t classical_samples() const noexcept { return classical_; }
  std::uint64_t quantum_oracle_calls() const noexcept { return quantum_; }
  std::uint64_t total() const noexcept { return classical_ + quantum_; }
  const std::map<std::string, std::uint64_t>& phases() const noexcept { return phases_; }

  /// Entrywise sum; the active phase of *this is unchanged.
  void merge(const QueryLedger& other);

  /// {"classical_samples":int,"quantum_oracle_calls":int,"phases":{label:int}}
  nlohmann::json to_json() const;
  static QueryLedger from_json(const nlohmann::json& doc);

  friend bool operator==(const QueryLedger& a, const QueryLedger& b) {
    return a.classical_ == b.classical_ && a.quantum_ == b.quantum_ && a.phases_ == b.phases_;
  }

 private:
  void add_to_phase(std::uint64_t n);

  std::uint64_t classical_ = 0;
  std::uint64_t quantum_ = 0;
  std::map<std::string, std::uint64_t> phases_;
  std::string phase_ = kDefaultPhase;
};

/// Sets a ledger's phase for the lifetime of the scope, then restores it.
class PhaseScope {
 public:
  PhaseScope(QueryLedger& ledger, std::string label) : ledger_(ledger), saved_(ledger.phase()) {
    ledger_.set_phase(std::move(label));
  }
  ~PhaseScope() { ledger_.set_phase(std::move(saved_)); }
  PhaseScope(const PhaseScope&) = delete;
  PhaseScope& operator=(const PhaseScope&) = delete;

 private:
  QueryLedger& ledger_;
  std::string saved_;
};

}  // namespace qmdp
