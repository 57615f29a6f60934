#include "hwfuzz/lock.hpp"

#include <stdexcept>

#include "hwfuzz/rng.hpp"

namespace hwfuzz {

namespace {

constexpr uint64_t kLockKind = 0x4C4F434BULL;  // "LOCK"

const uint16_t kResetSite = site_id("lock.reset");

// Per-state branch sites, computed once for the largest supported lock.
struct StateSites {
  std::vector<uint16_t> match;
  std::vector<uint16_t> hold;
  StateSites() : match(1u << 16), hold(1u << 16) {
    for (uint32_t s = 0; s < match.size(); ++s) {
      match[s] = site_id("lock.match", s);
      hold[s] = site_id("lock.hold", s);
    }
  }
};

const StateSites& state_sites() {
  static const StateSites sites;
  return sites;
}

}  // namespace

void LockConfig::validate() const {
  if (state_bits < 1 || state_bits > 16) {
    throw std::invalid_argument("state_bits must be in [1, 16], got " +
                                std::to_string(state_bits));
  }
  if (code_width < 1 || code_width > 32) {
    throw std::invalid_argument("code_width must be in [1, 32], got " +
                                std::to_string(code_width));
  }
}

uint64_t LockConfig::fingerprint(uint64_t kind) const {
  uint64_t h = splitmix64(kind);
  h = splitmix64(h ^ state_bits);
  h = splitmix64(h ^ code_width);
  return splitmix64(h ^ rng_seed);
}

DigitalLock::DigitalLock(LockConfig config) : config_(config) {
  config_.validate();
  code_mask_ = static_cast<uint32_t>(width_mask(config_.code_width));
  Rng rng(config_.rng_seed);
  codes_.resize(config_.state_count());
  for (auto& c : codes_) c = static_cast<uint32_t>(rng.bits(config_.code_width));
}

bool DigitalLock::eval(bool reset_n, uint32_t code, Tracer* tracer) {
  code &= code_mask_;
  if (!reset_n) {
    if (tracer) tracer->site(Component::Dut, kResetSite);
    state_ = 0;
  } else if (!unlocked() && code == codes_[state_]) {
    if (tracer) tracer->site(Component::Dut, state_sites().match[state_]);
    ++state_;
  } else {
    if (tracer) tracer->site(Component::Dut, state_sites().hold[state_]);
  }
  ++cycle_;
  return unlocked();
}

std::vector<uint32_t> DigitalLock::unlock_sequence() const {
  return {codes_.begin(), codes_.begin() + config_.unlocked_state()};
}

DutSnapshot DigitalLock::snapshot() const {
  return {config_.fingerprint(kLockKind), {state_, cycle_}};
}

void DigitalLock::restore(const DutSnapshot& snap) {
  if (snap.fingerprint != config_.fingerprint(kLockKind) || snap.words.size() != 2) {
    throw std::invalid_argument("snapshot was taken from a different lock configuration");
  }
  state_ = static_cast<uint32_t>(snap.words[0]);
  cycle_ = snap.words[1];
}

LockDut::LockDut(LockConfig config, Options options)
    : lock_(config), options_(options) {
  if (options_.expose_reset) ports_.push_back({"reset_n", 1});
  ports_.push_back({"code", config.code_width});
  if (options_.arm_unlock_assertion) {
    assertions_.add("unlocked", [](const DigitalLock& l) { return !l.unlocked(); });
  }
}

std::unique_ptr<Model> LockDut::fresh() const {
  auto m = std::make_unique<LockDut>(*this);
  m->lock_.power_on();
  m->reset_n_ = true;
  m->code_ = 0;
  m->assertions_.rearm();
  return m;
}

void LockDut::reset_cycle(Tracer& tracer) { lock_.eval(false, 0, &tracer); }

void LockDut::set_input(size_t port, uint64_t value) {
  if (port >= ports_.size()) throw std::out_of_range("no such input port");
  value &= width_mask(ports_[port].width);
  if (options_.expose_reset && port == 0) {
    reset_n_ = value != 0;
  } else {
    code_ = static_cast<uint32_t>(value);
  }
}

void LockDut::step(Tracer& tracer) { lock_.eval(reset_n_, code_, &tracer); }

}  // namespace hwfuzz
