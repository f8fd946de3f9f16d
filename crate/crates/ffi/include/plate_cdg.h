/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef PLATE_CDG_H
#define PLATE_CDG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlateStatus {
  PLATE_STATUS_OK = 0,
  PLATE_STATUS_NULL_POINTER = 1,
  PLATE_STATUS_INVALID_ARGUMENT = 2,
  PLATE_STATUS_NOT_ASSEMBLED = 3,
  PLATE_STATUS_NOT_SOLVED = 4,
  PLATE_STATUS_BUFFER_TOO_SMALL = 5,
  PLATE_STATUS_SOLVER_FAILED = 6,
  PLATE_STATUS_PANIC = 7,
} PlateStatus;

/*
 Opaque problem handle.
 */
typedef struct PlateProblem PlateProblem;

/*
 Summary of the latest solve.
 */
typedef struct PlateSolveInfo {
  size_t iterations;
  double objective;
  double kkt_residual;
  double rel_change;
  bool converged;
} PlateSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or an empty string.
 The pointer stays valid until the next call into this library.
 */
const char *plate_last_error(void);

/*
 Create a problem with default settings on an `n x n` cell mesh.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum PlateStatus plate_problem_new(size_t n, struct PlateProblem **out);

/*
 Create a problem from a JSON run configuration (missing fields take
 their defaults).

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer to
 writable storage for one handle.
 */
enum PlateStatus plate_problem_from_json(const char *json, struct PlateProblem **out);

/*
 Select method `j` (1..=5) and penalty `eta`. Drops any assembled system.

 # Safety
 `p` must be a handle from this library that has not been freed.
 */
enum PlateStatus plate_problem_set_method(struct PlateProblem *p, uint32_t j, double eta);

/*
 Assemble the reduced stiffness matrix, friction operator and load.

 # Safety
 `p` must be a handle from this library that has not been freed.
 */
enum PlateStatus plate_problem_assemble(struct PlateProblem *p);

/*
 Number of nodes (length of the nodal solution vector).

 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum PlateStatus plate_problem_num_nodes(struct PlateProblem *p, size_t *out);

/*
 Number of unknowns of the reduced system (clamped nodes removed).

 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum PlateStatus plate_problem_num_free_dofs(struct PlateProblem *p, size_t *out);

/*
 Run the solver on the assembled system. A run that stops without
 meeting the tolerance still stores its iterate and returns
 `SolverFailed`.

 # Safety
 `p` must be a handle from this library that has not been freed.
 */
enum PlateStatus plate_problem_solve(struct PlateProblem *p);

/*
 Copy the nodal solution into `buf` (`len` entries, at least the node
 count). Node order matches [`plate_problem_nodes`].

 # Safety
 `p` must be a live handle and `buf` valid for `len` writes.
 */
enum PlateStatus plate_problem_solution(struct PlateProblem *p, double *buf, size_t len);

/*
 Copy node coordinates as interleaved `x, y` pairs into `buf` (`len` at
 least twice the node count).

 # Safety
 `p` must be a live handle and `buf` valid for `len` writes.
 */
enum PlateStatus plate_problem_nodes(struct PlateProblem *p, double *buf, size_t len);

/*
 Statistics of the latest solve.

 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum PlateStatus plate_problem_solve_info(struct PlateProblem *p, struct PlateSolveInfo *out);

/*
 Release a handle. Null is ignored.

 # Safety
 `p` must be null or a handle from this library that has not been freed.
 */
void plate_problem_free(struct PlateProblem *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLATE_CDG_H */
