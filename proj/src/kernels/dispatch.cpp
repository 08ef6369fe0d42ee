#include <cstdlib>
#include <string_view>

#include "ecs/kernels.hpp"

namespace ecs::kernels {

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("ECS_KERNELS");
  if (forced != nullptr) {
    const std::string_view name(forced);
    if (name == "scalar") return scalar();
    if (name == "avx2" && avx2() != nullptr) return *avx2();
    if (name == "neon" && neon() != nullptr) return *neon();
    return scalar();
  }
  if (const auto* t = avx2()) return *t;
  if (const auto* t = neon()) return *t;
  return scalar();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const auto* t = avx2()) out.push_back(t);
  if (const auto* t = neon()) out.push_back(t);
  return out;
}

}  // namespace ecs::kernels
