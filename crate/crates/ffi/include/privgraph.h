#ifndef PRIVGRAPH_H
#define PRIVGRAPH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Which graph of a release to copy out.
 */
typedef enum PgReleasePart {
  /**
   * The released graph.
   */
  PG_RELEASE_PART_WHOLE = 0,
  /**
   * Cut releases only: the reweighted topology sample.
   */
  PG_RELEASE_PART_HEAVY = 1,
  /**
   * Cut releases only: the synthesized residual.
   */
  PG_RELEASE_PART_LIGHT = 2,
} PgReleasePart;

/**
 * Result code of every fallible call.
 */
typedef enum PgStatus {
  PG_STATUS_OK = 0,
  PG_STATUS_NULL_POINTER = 1,
  PG_STATUS_DOMAIN = 2,
  PG_STATUS_CAPACITY = 3,
  PG_STATUS_NOT_CONVERGED = 4,
  PG_STATUS_INVARIANT = 5,
  PG_STATUS_CONFIG = 6,
  PG_STATUS_IO = 7,
  PG_STATUS_PARSE = 8,
  PG_STATUS_INVALID_UTF8 = 9,
  PG_STATUS_PANIC = 10,
} PgStatus;

/**
 * Opaque weighted graph.
 */
typedef struct PgGraph PgGraph;

/**
 * Opaque result of a spectral or cut release.
 */
typedef struct PgRelease PgRelease;

/**
 * An `(ε, δ)` pair.
 */
typedef struct PgBudget {
  double epsilon;
  double delta;
} PgBudget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pg_version(void);

/**
 * Creates an empty graph on `n` vertices.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum PgStatus pg_graph_new(uintptr_t n, struct PgGraph **out);

/**
 * Loads an edge-list file. Negative weights are rejected unless `allow_negative`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PgStatus pg_graph_load(const char *path, bool allow_negative, struct PgGraph **out);

/**
 * Writes an edge-list file.
 *
 * # Safety
 * `g` must be a live handle; `path` a NUL-terminated string.
 */
enum PgStatus pg_graph_save(const struct PgGraph *g, const char *path);

/**
 * Releases a graph handle. Null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void pg_graph_free(struct PgGraph *g);

/**
 * Sets the weight of `{u, v}`. Negative weights require `allow_negative`.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum PgStatus pg_graph_set_weight(struct PgGraph *g,
                                  uintptr_t u,
                                  uintptr_t v,
                                  double w,
                                  bool allow_negative);

/**
 * Weight of `{u, v}` (0 when absent).
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum PgStatus pg_graph_weight(const struct PgGraph *g, uintptr_t u, uintptr_t v, double *out);

/**
 * Vertex count; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
uintptr_t pg_graph_vertex_count(const struct PgGraph *g);

/**
 * Number of stored slots, including explicit zeros; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
uintptr_t pg_graph_slot_count(const struct PgGraph *g);

/**
 * The `index`-th stored slot in `(u, v)` lexicographic order.
 *
 * # Safety
 * `g` must be a live handle; the outputs writable.
 */
enum PgStatus pg_graph_slot(const struct PgGraph *g,
                            uintptr_t index,
                            uintptr_t *u,
                            uintptr_t *v,
                            double *w);

/**
 * Runs the `(4ε, 0)` spectral release.
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum PgStatus pg_spectral_release(const struct PgGraph *g,
                                  double epsilon,
                                  double beta,
                                  uint64_t seed,
                                  struct PgRelease **out);

/**
 * Runs the `(5ε, δ)` cut release. A NaN `beta` selects the default and
 * `md_iterations = 0` the default round count.
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum PgStatus pg_cut_release(const struct PgGraph *g,
                             double epsilon,
                             double delta,
                             double beta,
                             uintptr_t md_iterations,
                             uint64_t seed,
                             struct PgRelease **out);

/**
 * Copies one graph of a release into a new graph handle.
 *
 * # Safety
 * `r` must be a live release handle; `out` writable.
 */
enum PgStatus pg_release_graph(const struct PgRelease *r,
                               enum PgReleasePart part,
                               struct PgGraph **out);

/**
 * Total privacy charged by the release.
 *
 * # Safety
 * `r` must be a live release handle; `out` writable.
 */
enum PgStatus pg_release_budget(const struct PgRelease *r, struct PgBudget *out);

/**
 * Noisy edge count `m̂` drawn by the release; 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live release handle.
 */
uintptr_t pg_release_m_hat(const struct PgRelease *r);

/**
 * Releases a release handle. Null is ignored.
 *
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void pg_release_free(struct PgRelease *r);

/**
 * `R_eff(u, v)` on a connected graph.
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum PgStatus pg_effective_resistance(const struct PgGraph *g,
                                      uintptr_t u,
                                      uintptr_t v,
                                      double *out);

/**
 * Exact `max |Φ_a − Φ_b|` over disjoint `(S, T)`; `n ≤ 13`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` writable.
 */
enum PgStatus pg_max_cut_error(const struct PgGraph *a, const struct PgGraph *b, double *out);

/**
 * `‖L_a − L_b‖₂` by power iteration from a seeded start.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` writable.
 */
enum PgStatus pg_spectral_norm_diff(const struct PgGraph *a,
                                    const struct PgGraph *b,
                                    uint64_t seed,
                                    double *out);

/**
 * Slot index of `{u, v}` in an `n`-vertex graph.
 *
 * # Safety
 * `out` must be writable.
 */
enum PgStatus pg_edge_id(uintptr_t u, uintptr_t v, uintptr_t n, uintptr_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRIVGRAPH_H */
