#ifndef DRAMDSE_ERRORS_H_
#define DRAMDSE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dramdse {

// Config file cannot be read or does not parse.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// No tiling on the enumeration lattice fits the on-chip buffers.
class EmptyPartitionSpace : public std::runtime_error {
 public:
  explicit EmptyPartitionSpace(const std::string& what)
      : std::runtime_error(what) {}
};

// A layer's tensors do not fit in one DRAM chip under the given geometry.
class CapacityExceeded : public std::runtime_error {
 public:
  explicit CapacityExceeded(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace dramdse

#endif  // DRAMDSE_ERRORS_H_
