#include <cmath>
#include <exception>
#include <string>

#include "eprqkd/errors.hpp"
#include "eprqkd/protocol.hpp"

namespace eprqkd::protocol {

SessionSetup::SessionSetup(bounds::ProtocolParams params, BitMatrix pa_matrix)
    : params_(params), pa_matrix_(std::move(pa_matrix)) {
  if (const std::string violated = bounds::check_params(params_); !violated.empty()) {
    throw ParameterError("protocol parameters violate: " + violated);
  }
  if (pa_matrix_.rows() != params_.m || pa_matrix_.cols() != params_.r) {
    throw ParameterError("privacy-amplification matrix must be " + std::to_string(params_.m) +
                         " x " + std::to_string(params_.r));
  }
  const auto report = gf2::min_combination_weight(pa_matrix_);
  if (!report.full_rank) throw ParameterError("privacy-amplification matrix is rank deficient");
  if (report.min_weight < params_.d_k) {
    throw ParameterError("privacy-amplification matrix has a row combination of weight " +
                         std::to_string(report.min_weight) + " < d_K = " +
                         std::to_string(params_.d_k));
  }
}

SessionPlan plan_session(const bounds::ProtocolParams& params, const SessionOptions& options) {
  SessionPlan plan;
  plan.sample_size = cascade::sample_size_for(options.estimation_fraction, params.s);
  plan.sift_target = params.s + plan.sample_size;
  const double sift_rate = (1.0 - params.epsilon) / 2.0 - params.tau_s;
  const double effective_r = static_cast<double>(params.r) +
                             (1.0 - params.epsilon) * static_cast<double>(plan.sample_size);
  plan.pairs = static_cast<std::size_t>(std::ceil(effective_r / sift_rate - 1e-9));
  plan.pad_bits = options.pad_bits != 0 ? options.pad_bits : 4 * plan.sift_target;
  return plan;
}

const char* status_name(SessionStatus status) {
  switch (status) {
    case SessionStatus::Validated:
      return "validated";
    case SessionStatus::SiftFailed:
      return "sift_failed";
    case SessionStatus::EstimateAbort:
      return "estimate_abort";
    case SessionStatus::ErrorThreshold:
      return "error_threshold";
    case SessionStatus::Fault:
      return "fault";
  }
  return "unknown";
}

namespace {

std::vector<std::size_t> map_positions(std::span<const std::size_t> local,
                                       std::span<const std::size_t> global) {
  std::vector<std::size_t> out;
  out.reserve(local.size());
  for (auto k : local) out.push_back(global[k]);
  return out;
}

void finish_failed(SessionOutcome& out, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kFallbackStream));
  out.kappa_alice = fallback_key(out.m, rng);
  out.kappa_bob = BitVec(out.m);
  out.transcript.validated = false;
}

}  // namespace

SessionOutcome run_session(const SessionSetup& setup, const quantum::SourceModel& source,
                           const SessionOptions& options, std::uint64_t seed) {
  const auto& params = setup.params();
  SessionOutcome out;
  out.seed = seed;
  out.s = params.s;
  out.r = params.r;
  out.m = params.m;

  try {
    const SessionPlan plan = plan_session(params, options);
    out.n = plan.pairs;

    Rng quantum_rng(derive_seed(seed, kQuantumStream));
    out.measurement = quantum::sample_transmission(source, plan.pairs, quantum_rng);
    const auto& meas = out.measurement;
    out.classical = {meas.alice_bases, meas.bob_bases, meas.alice_bits, meas.bob_bits};
    out.transcript.a = meas.alice_bases;

    SiftResult sifted = sift(meas.alice_bases, meas.bob_bases, plan.sift_target);
    out.transcript.d = sifted.d;
    if (sifted.failed()) {
      out.status = SessionStatus::SiftFailed;
      finish_failed(out, seed);
      return out;
    }
    const std::vector<std::size_t>& sift_positions = *sifted.sifted;
    const BitVec alice_sifted = meas.alice_bits.select(sift_positions);
    const BitVec bob_sifted = meas.bob_bits.select(sift_positions);

    auto pad = std::make_shared<const cascade::Pad>(
        cascade::Pad::from_seed(derive_seed(seed, kPadStream), plan.pad_bits));
    auto [alice_ep, bob_ep] = cascade::make_endpoints(pad);

    auto finish_channel = [&] {
      out.pad_consumed = alice_ep.ledger().consumed();
      out.transcript.channel_log = alice_ep.log();
    };

    Rng sample_rng(derive_seed(seed, kSampleStream));
    const cascade::EstimateResult estimate = cascade::estimate_error_rate_sample(
        alice_sifted, bob_sifted, plan.sample_size, alice_ep, bob_ep, sample_rng);
    out.estimated_rate = estimate.estimated_rate;
    out.transcript.sample = map_positions(estimate.sample_indices, sift_positions);
    out.transcript.sample_errors = map_positions(estimate.mismatches, sift_positions);

    if (options.abort_on_estimate && estimate.estimated_rate >= params.epsilon) {
      out.status = SessionStatus::EstimateAbort;
      out.qber = estimate.estimated_rate;
      finish_channel();
      out.net_gain = -static_cast<long long>(out.pad_consumed);
      finish_failed(out, seed);
      return out;
    }

    std::vector<std::size_t> S;
    S.reserve(params.s);
    {
      std::size_t next = 0;
      for (std::size_t k = 0; k < sift_positions.size(); ++k) {
        if (next < estimate.sample_indices.size() && estimate.sample_indices[next] == k) {
          ++next;
          continue;
        }
        S.push_back(sift_positions[k]);
      }
    }
    const BitVec alice_s = cascade::remove_positions(alice_sifted, estimate.sample_indices);
    BitVec bob_s = cascade::remove_positions(bob_sifted, estimate.sample_indices);

    cascade::ReconcileConfig config;
    const std::uint64_t shuffle_seed = derive_seed(seed, kShuffleStream);
    if (options.block_sizes.empty()) {
      config = cascade::default_config(estimate.estimated_rate, params.s, shuffle_seed,
                                       1.0 / static_cast<double>(plan.sample_size),
                                       options.passes);
    } else {
      config.block_sizes = options.block_sizes;
      for (std::size_t p = 0; p < options.block_sizes.size(); ++p) {
        config.shuffle_seeds.push_back(derive_seed(shuffle_seed, p));
      }
    }
    config.estimation_fraction = options.estimation_fraction;
    config.confirm_round = options.confirm_round;

    const cascade::ReconcileReport report =
        cascade::reconcile(alice_s, bob_s, config, alice_ep, bob_ep);
    finish_channel();
    out.parities_exchanged = report.parities_exchanged;
    out.residual_mismatch = report.residual_mismatch;

    BitVec e(params.s);
    std::vector<std::size_t> E;
    for (auto k : report.error_positions) {
      e.set(k, true);
      E.push_back(S[k]);
    }
    out.transcript.e = e;
    out.errors_found = E.size();
    out.qber = static_cast<double>(E.size()) / static_cast<double>(params.s);

    if (!validate(E.size(), params.epsilon, params.s)) {
      out.status = SessionStatus::ErrorThreshold;
      out.net_gain = -static_cast<long long>(out.pad_consumed);
      finish_failed(out, seed);
      return out;
    }

    const auto R = reconciled_set(S, E, params.r);
    out.kappa_alice = privacy_amplify(setup.pa_matrix(), meas.alice_bits.select(R));
    out.kappa_bob = privacy_amplify(setup.pa_matrix(), meas.bob_bits.select(R));
    out.status = SessionStatus::Validated;
    out.transcript.validated = true;
    out.net_gain = static_cast<long long>(params.m) - static_cast<long long>(out.pad_consumed);
    return out;
  } catch (const PadExhausted& ex) {
    out.status = SessionStatus::Fault;
    out.fault_message = ex.what();
    out.pad_consumed = ex.consumed();
    out.net_gain = -static_cast<long long>(out.pad_consumed);
    finish_failed(out, seed);
    return out;
  } catch (const std::exception& ex) {
    out.status = SessionStatus::Fault;
    out.fault_message = ex.what();
    out.net_gain = -static_cast<long long>(out.pad_consumed);
    finish_failed(out, seed);
    return out;
  }
}

}  // namespace eprqkd::protocol
