#include "hwfuzz/bus.hpp"

#include <cstdio>
#include <sstream>

namespace hwfuzz {

namespace {
const uint16_t kGetSite = site_id("tlul.a_get");
const uint16_t kPutSite = site_id("tlul.a_put_full");
const uint16_t kAckSite = site_id("tlul.d_ack");
const uint16_t kErrorSite = site_id("tlul.d_error");
const uint16_t kIdleSite = site_id("tlul.idle");
}  // namespace

void BusHost::respond(bool error_before) {
  tracer_->site(Component::Bus,
                !error_before && device_->bus_error() ? kErrorSite : kAckSite);
}

uint32_t BusHost::get(uint32_t addr) {
  tracer_->site(Component::Bus, kGetSite);
  const bool err = device_->bus_error();
  const uint32_t value = device_->read(addr, *tracer_);
  device_->tick(*tracer_);
  respond(err);
  return value;
}

void BusHost::put_full(uint32_t addr, uint32_t data) {
  tracer_->site(Component::Bus, kPutSite);
  const bool err = device_->bus_error();
  device_->write(addr, data, *tracer_);
  device_->tick(*tracer_);
  respond(err);
}

void BusHost::wait() {
  tracer_->site(Component::Bus, kIdleSite);
  device_->tick(*tracer_);
}

std::string_view to_string(Access a) { return a == Access::ReadOnly ? "RO" : "RW"; }

std::string render_register_map(const MmioDevice& device) {
  std::ostringstream out;
  out << "| Offset | Name | Access | Fields |\n";
  out << "|--------|------|--------|--------|\n";
  for (const auto& r : device.register_map()) {
    char off[16];
    std::snprintf(off, sizeof off, "0x%02X", r.offset);
    out << "| " << off << " | " << r.name << " | " << to_string(r.access) << " | "
        << r.fields << " |\n";
  }
  return out.str();
}

}  // namespace hwfuzz
