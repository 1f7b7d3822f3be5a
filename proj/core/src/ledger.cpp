#include "qmdp/ledger.hpp"

#include <limits>

#include "qmdp/error.hpp"

namespace qmdp {
namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > std::numeric_limits<std::uint64_t>::max() - a) {
    throw InternalError("QueryLedger: counter overflow");
  }
  return a + b;
}

}  // namespace

void QueryLedger::add_to_phase(std::uint64_t n) {
  auto& slot = phases_[phase_];
  slot = checked_add(slot, n);
}

void QueryLedger::charge_classical(std::uint64_t n) {
  classical_ = checked_add(classical_, n);
  add_to_phase(n);
}

void QueryLedger::charge_quantum(std::uint64_t n) {
  quantum_ = checked_add(quantum_, n);
  add_to_phase(n);
}

void QueryLedger::merge(const QueryLedger& other) {
  classical_ = checked_add(classical_, other.classical_);
  quantum_ = checked_add(quantum_, other.quantum_);
  for (const auto& [label, count] : other.phases_) {
    auto& slot = phases_[label];
    slot = checked_add(slot, count);
  }
}

nlohmann::json QueryLedger::to_json() const {
  nlohmann::json phases = nlohmann::json::object();
  for (const auto& [label, count] : phases_) {
    phases[label] = count;
  }
  return {{"classical_samples", classical_}, {"quantum_oracle_calls", quantum_}, {"phases", phases}};
}

QueryLedger QueryLedger::from_json(const nlohmann::json& doc) {
  QueryLedger out;
  try {
    out.classical_ = doc.at("classical_samples").get<std::uint64_t>();
    out.quantum_ = doc.at("quantum_oracle_calls").get<std::uint64_t>();
    for (const auto& [label, count] : doc.at("phases").items()) {
      out.phases_[label] = count.get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("ledger JSON: ") + e.what());
  }
  return out;
}

}  // namespace qmdp
