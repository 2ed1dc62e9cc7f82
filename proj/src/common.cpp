#include "keysel/error.hpp"
#include "keysel/random.hpp"

namespace keysel {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kInput:
    case ErrorKind::kIo:
      return 3;
    case ErrorKind::kEvaluation:
      return 4;
    case ErrorKind::kInternal:
      break;
  }
  return 1;
}

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kInput:
      return "input";
    case ErrorKind::kEvaluation:
      return "evaluation";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kInternal:
      break;
  }
  return "internal";
}

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  if (n == 0) throw internal_error("uniform_index: empty range");
  // Largest multiple of n that fits; values at or above it are rejected.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double RandomSource::uniform_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace keysel
