#include <atomic>
#include <cstdlib>

#include "plh/errors.hpp"
#include "plh/kernels.hpp"

namespace plh::kernels {

namespace detail {
#if !defined(PLH_HAVE_AVX2)
const Table* avx2_table() { return nullptr; }
#endif
#if !defined(PLH_HAVE_NEON)
const Table* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(PLH_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (std::getenv("PLH_FORCE_SCALAR")) return Backend::scalar;
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct State {
  std::atomic<Backend> backend;
  std::atomic<const Table*> table;
};

State& state() {
  static State s{detect(), nullptr};
  static const bool init = (s.table = &table(s.backend.load()), true);
  (void)init;
  return s;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Backend::neon: return detail::neon_table() != nullptr;
  }
  return false;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

const Table& table(Backend b) {
  if (!backend_available(b))
    throw ContractError("kernel backend " + std::string(backend_name(b)) + " is not available");
  switch (b) {
    case Backend::avx2: return *detail::avx2_table();
    case Backend::neon: return *detail::neon_table();
    default: return detail::scalar_table;
  }
}

Backend active_backend() { return state().backend.load(std::memory_order_relaxed); }

const Table& active() { return *state().table.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  const Table* t = &table(b);
  state().backend.store(b, std::memory_order_relaxed);
  state().table.store(t, std::memory_order_relaxed);
}

}  // namespace plh::kernels
