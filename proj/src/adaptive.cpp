#include "fairbroker/adaptive.hpp"

#include <algorithm>
#include <string>

#include "fairbroker/errors.hpp"

namespace fairbroker {

FeedbackEvent classify_feedback(bool truly_fair, bool decided_fair) {
  if (truly_fair == decided_fair) return FeedbackEvent::CorrectEvaluation;
  return decided_fair ? FeedbackEvent::FalsePositive : FeedbackEvent::FalseNegative;
}

std::string_view to_string(AdaptiveMode mode) {
  switch (mode) {
    case AdaptiveMode::Off:
      return "off";
    case AdaptiveMode::PaperIVC:
      return "paper-ivc";
    case AdaptiveMode::PaperVB:
      return "paper-vb";
  }
  return "?";
}

AdaptiveMode adaptive_mode_from_string(std::string_view text) {
  if (text == "off") return AdaptiveMode::Off;
  if (text == "paper-ivc") return AdaptiveMode::PaperIVC;
  if (text == "paper-vb") return AdaptiveMode::PaperVB;
  throw DomainError("unknown adaptive mode '" + std::string(text) + "'");
}

namespace {

void clamp_all(ControllerState& s) {
  const auto& b = s.bounds;
  s.thresholds.min_fair = std::clamp(s.thresholds.min_fair, b.min_fair_lo, b.min_fair_hi);
  s.thresholds.max_unfair = std::clamp(s.thresholds.max_unfair, b.max_unfair_lo, b.max_unfair_hi);
  s.samples_per_epoch = std::clamp(s.samples_per_epoch, b.samples_floor, b.samples_cap);
  s.epoch_length = std::min(s.epoch_length, b.epoch_cap);
}

void tighten(ControllerState& s) {
  s.thresholds.min_fair += s.notch;
  s.thresholds.max_unfair -= s.notch;
}

void loosen(ControllerState& s) {
  s.thresholds.min_fair -= s.notch;
  s.thresholds.max_unfair += s.notch;
}

}  // namespace

ControllerState apply_feedback(ControllerState state, FeedbackEvent event) {
  switch (state.mode) {
    case AdaptiveMode::Off:
      return state;

    case AdaptiveMode::PaperVB:
      if (event == FeedbackEvent::CorrectEvaluation) {
        loosen(state);
      } else {
        tighten(state);
      }
      break;

    case AdaptiveMode::PaperIVC:
      switch (event) {
        case FeedbackEvent::FalsePositive:
          state.thresholds.max_unfair -= state.notch;
          state.samples_per_epoch += state.bounds.sample_step;
          state.streak = 0;
          break;
        case FeedbackEvent::FalseNegative:
          state.thresholds.min_fair += state.notch;
          state.samples_per_epoch += state.bounds.sample_step;
          state.streak = 0;
          break;
        case FeedbackEvent::CorrectEvaluation:
          if (++state.streak >= state.bounds.correct_streak) {
            state.epoch_length += state.bounds.epoch_step;
            state.samples_per_epoch -= state.bounds.sample_step;
            state.streak = 0;
          }
          break;
      }
      break;
  }
  clamp_all(state);
  return state;
}

}  // namespace fairbroker
