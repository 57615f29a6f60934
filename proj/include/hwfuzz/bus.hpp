#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwfuzz/model.hpp"

namespace hwfuzz {

enum class Access : uint8_t { ReadWrite, ReadOnly };

struct RegisterInfo {
  uint32_t offset;
  std::string name;
  Access access;
  std::string fields;
};

// A memory-mapped peripheral. Reads of unmapped offsets return 0 and writes
// to unmapped or read-only offsets are dropped; both set the sticky
// bus-error flag, which only a reset clears.
class MmioDevice : public Model {
 public:
  virtual uint32_t read(uint32_t addr, Tracer& tracer) = 0;
  virtual void write(uint32_t addr, uint32_t data, Tracer& tracer) = 0;
  // Advance one clock.
  virtual void tick(Tracer& tracer) = 0;
  virtual std::vector<RegisterInfo> register_map() const = 0;

  bool bus_error() const { return bus_error_; }

 protected:
  void flag_bus_error() { bus_error_ = true; }
  bool bus_error_ = false;
};

// Single-beat TL-UL host with an always-ready device: each Get or
// PutFullData occupies one clock cycle, and its response is available at the
// end of that cycle.
class BusHost {
 public:
  BusHost(MmioDevice& device, Tracer& tracer) : device_(&device), tracer_(&tracer) {}

  // TL-UL Get: full 32-bit read.
  uint32_t get(uint32_t addr);
  // TL-UL PutFullData: full-width write, all byte lanes enabled.
  void put_full(uint32_t addr, uint32_t data);
  // Idle cycle.
  void wait();

  MmioDevice& device() { return *device_; }

 private:
  void respond(bool error_before);

  MmioDevice* device_;
  Tracer* tracer_;
};

std::string_view to_string(Access a);

// Markdown table of a device's register map.
std::string render_register_map(const MmioDevice& device);

}  // namespace hwfuzz
