// Built-in copy of data/sphere_table.txt; a test asserts the two stay equal.
#pragma once

namespace selfclose {

inline const char* builtin_sphere_table_text() {
  return R"(# Homotopy groups of spheres above the diagonal: lines are "n k group".
# Below-diagonal groups are zero and the diagonal is Z; both are implied,
# but explicit entries are accepted and checked for consistency.
1 2 0
1 3 0
1 4 0
1 5 0
1 6 0
1 7 0
1 8 0
1 9 0
2 3 Z
2 4 Z/2
2 5 Z/2
2 6 Z/12
2 7 Z/2
2 8 Z/2
2 9 Z/3
2 10 Z/15
3 4 Z/2
3 5 Z/2
3 6 Z/12
3 7 Z/2
3 8 Z/2
3 9 Z/3
3 10 Z/15
3 11 Z/2
4 5 Z/2
4 6 Z/2
4 7 Z+Z/12
4 8 Z/2+Z/2
4 9 Z/2+Z/2
4 10 Z/24+Z/3
4 11 Z/15
4 12 Z/2
5 6 Z/2
5 7 Z/2
5 8 Z/24
5 9 Z/2
5 10 Z/2
5 11 Z/2
5 12 Z/30
5 13 Z/2
6 7 Z/2
6 8 Z/2
6 9 Z/24
6 10 0
6 11 Z
6 12 Z/2
6 13 Z/60
6 14 Z/24+Z/2
7 8 Z/2
7 9 Z/2
7 10 Z/24
7 11 0
7 12 0
7 13 Z/2
7 14 Z/120
7 15 Z/2+Z/2+Z/2
8 9 Z/2
8 10 Z/2
8 11 Z/24
8 12 0
8 13 0
8 14 Z/2
8 15 Z+Z/120
8 16 Z/2+Z/2+Z/2+Z/2
)";
}

}  // namespace selfclose
