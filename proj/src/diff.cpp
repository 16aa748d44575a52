#include "ddclab/diff.hpp"

#include <algorithm>

namespace ddclab {

namespace {

enum class EditKind { Keep, Delete, Insert };

struct Edit {
  EditKind kind;
  std::size_t a_index;  // valid for Keep and Delete
  std::size_t b_index;  // valid for Keep and Insert
};

// Myers O(ND) edit script.
std::vector<Edit> edit_script(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  const int n = int(a.size());
  const int m = int(b.size());
  const int max = n + m;
  std::vector<std::vector<int>> trace;
  std::vector<int> v(std::size_t(2 * max + 1), 0);

  auto at = [&](std::vector<int>& vec, int k) -> int& { return vec[std::size_t(k + max)]; };

  int found_d = -1;
  for (int d = 0; d <= max; ++d) {
    trace.push_back(v);
    for (int k = -d; k <= d; k += 2) {
      int x;
      if (k == -d || (k != d && at(v, k - 1) < at(v, k + 1))) {
        x = at(v, k + 1);
      } else {
        x = at(v, k - 1) + 1;
      }
      int y = x - k;
      while (x < n && y < m && a[std::size_t(x)] == b[std::size_t(y)]) {
        ++x;
        ++y;
      }
      at(v, k) = x;
      if (x >= n && y >= m) {
        found_d = d;
        break;
      }
    }
    if (found_d >= 0) break;
  }

  // Backtrack.
  std::vector<Edit> edits;
  int x = n, y = m;
  for (int d = found_d; d > 0; --d) {
    auto& prev = trace[std::size_t(d)];
    int k = x - y;
    int prev_k;
    if (k == -d || (k != d && at(prev, k - 1) < at(prev, k + 1))) {
      prev_k = k + 1;
    } else {
      prev_k = k - 1;
    }
    int prev_x = at(prev, prev_k);
    int prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      edits.push_back({EditKind::Keep, std::size_t(x - 1), std::size_t(y - 1)});
      --x;
      --y;
    }
    if (x == prev_x) {
      edits.push_back({EditKind::Insert, 0, std::size_t(y - 1)});
      --y;
    } else {
      edits.push_back({EditKind::Delete, std::size_t(x - 1), 0});
      --x;
    }
  }
  while (x > 0 && y > 0) {
    edits.push_back({EditKind::Keep, std::size_t(x - 1), std::size_t(y - 1)});
    --x;
    --y;
  }
  while (x > 0) {
    edits.push_back({EditKind::Delete, std::size_t(x - 1), 0});
    --x;
  }
  while (y > 0) {
    edits.push_back({EditKind::Insert, 0, std::size_t(y - 1)});
    --y;
  }
  std::reverse(edits.begin(), edits.end());
  return edits;
}

}  // namespace

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> unified_diff(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      int context) {
  if (a == b) return {};
  auto edits = edit_script(a, b);

  // Mark lines that belong in some hunk (changes plus surrounding context).
  std::vector<bool> emit(edits.size(), false);
  for (std::size_t i = 0; i < edits.size(); ++i) {
    if (edits[i].kind != EditKind::Keep) {
      std::size_t lo = i >= std::size_t(context) ? i - std::size_t(context) : 0;
      std::size_t hi = std::min(edits.size() - 1, i + std::size_t(context));
      for (std::size_t j = lo; j <= hi; ++j) emit[j] = true;
    }
  }

  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < edits.size()) {
    if (!emit[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < edits.size() && emit[j]) ++j;

    std::size_t a_start = a.size(), b_start = b.size();
    std::size_t a_count = 0, b_count = 0;
    for (std::size_t k = i; k < j; ++k) {
      const Edit& e = edits[k];
      if (e.kind != EditKind::Insert) {
        a_start = std::min(a_start, e.a_index);
        ++a_count;
      }
      if (e.kind != EditKind::Delete) {
        b_start = std::min(b_start, e.b_index);
        ++b_count;
      }
    }
    if (a_count == 0) a_start = (i > 0) ? edits[i - 1].a_index + 1 : 0;
    if (b_count == 0) b_start = (i > 0) ? edits[i - 1].b_index + 1 : 0;

    out.push_back("@@ -" + std::to_string(a_count ? a_start + 1 : a_start) + "," +
                  std::to_string(a_count) + " +" +
                  std::to_string(b_count ? b_start + 1 : b_start) + "," +
                  std::to_string(b_count) + " @@");
    for (std::size_t k = i; k < j; ++k) {
      const Edit& e = edits[k];
      switch (e.kind) {
        case EditKind::Keep: out.push_back(" " + a[e.a_index]); break;
        case EditKind::Delete: out.push_back("-" + a[e.a_index]); break;
        case EditKind::Insert: out.push_back("+" + b[e.b_index]); break;
      }
    }
    i = j;
  }
  return out;
}

}  // namespace ddclab
