#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace psq {

namespace detail {
inline std::atomic<unsigned>& thread_cap()
{
	static std::atomic<unsigned> cap{0};
	return cap;
}
} // namespace detail

/// Caps worker threads used by library loops; 0 restores the default
/// (PSQ_LAB_THREADS if set, else hardware concurrency).
inline void set_thread_count(unsigned n)
{
	detail::thread_cap() = n;
}

inline unsigned thread_count()
{
	unsigned cap = detail::thread_cap();
	if (cap)
		return cap;
	if (const char* env = std::getenv("PSQ_LAB_THREADS")) {
		int v = std::atoi(env);
		if (v > 0)
			return static_cast<unsigned>(v);
	}
	return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [begin, end) over contiguous blocks. fn must only
/// write to slots owned by i, so results never depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn)
{
	if (end <= begin)
		return;
	const std::size_t n = end - begin;
	const std::size_t workers = std::min<std::size_t>(thread_count(), n);
	if (workers <= 1 || n < 64) {
		for (std::size_t i = begin; i < end; ++i)
			fn(i);
		return;
	}
	std::vector<std::thread> pool;
	const std::size_t chunk = (n + workers - 1) / workers;
	for (std::size_t w = 0; w < workers; ++w) {
		const std::size_t lo = begin + w * chunk;
		const std::size_t hi = std::min(end, lo + chunk);
		if (lo >= hi)
			break;
		pool.emplace_back([lo, hi, &fn] {
			for (std::size_t i = lo; i < hi; ++i)
				fn(i);
		});
	}
	for (auto& t : pool)
		t.join();
}

} // namespace psq
