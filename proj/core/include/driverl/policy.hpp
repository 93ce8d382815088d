#pragma once

#include <memory>
#include <string>

#include "driverl/behavior.hpp"
#include "driverl/mpc_params.hpp"
#include "driverl/track.hpp"

namespace driverl {

/// Text-in / text-out completion source.
class CompletionPolicy {
 public:
  virtual ~CompletionPolicy() = default;
  /// Throws PolicyError when the policy cannot answer.
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

/// Reasoning block plus a new_mpc_params assignment of every field.
std::string format_mpc_completion(const MpcParams& params, const std::string& reasoning);
/// Reasoning block plus <answer>yes|no</answer>.
std::string format_decision_completion(bool yes, const std::string& reasoning);

/// Behaviour guessed from the instruction text by keywords.
BehaviorSpec infer_behavior(const std::string& instruction);

/// Hand-tuned parameters realising a behaviour on a track.
MpcParams oracle_params(const BehaviorSpec& behavior, const TrackGeometry& track);

/// Policies by name: mock-default, mock-garbage, oracle (mpc); mock-yes,
/// mock-no, oracle (decision); anything starting with http:// is an HTTP
/// endpoint taking {"prompt"} and answering {"completion"}. Throws
/// ValidationError for an unknown name.
std::unique_ptr<CompletionPolicy> make_mpc_policy(const std::string& name, const TrackGeometry& track);
std::unique_ptr<CompletionPolicy> make_decision_policy(const std::string& name);

}  // namespace driverl
