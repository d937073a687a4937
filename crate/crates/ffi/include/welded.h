/* C interface for welded-ffi: welded tree graphs, adjacency oracles, and
 * the column walk. Maintained by hand alongside crates/ffi/src/lib.rs.
 *
 * All fallible calls return a status code and write results through out
 * pointers, which are only written on WELDED_OK. Handles are opaque and
 * must be released with the matching _free function exactly once.
 */

#ifndef WELDED_H
#define WELDED_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. */
#define WELDED_OK 0
#define WELDED_NULL_ARGUMENT 1
#define WELDED_INVALID_ARGUMENT 2
#define WELDED_INTERNAL 3

/* Colors. */
#define WELDED_COLOR_RED 0u
#define WELDED_COLOR_GREEN 1u
#define WELDED_COLOR_BLUE 2u

typedef struct WeldedGraph WeldedGraph;
typedef struct WeldedOracle WeldedOracle;

/* Graphs ------------------------------------------------------------- */

/* Build the canonical welded tree of size n (1 <= n <= 20) from a seed. */
int32_t welded_graph_build(uint32_t n, uint64_t seed, WeldedGraph **out);

/* Parse a graph from the JSON produced by welded_graph_to_json (or the
 * `welded gen-graph` CLI); validates structure fully. */
int32_t welded_graph_from_json(const char *json, WeldedGraph **out);

void welded_graph_free(WeldedGraph *graph);

int32_t welded_graph_n(const WeldedGraph *graph, uint32_t *out);
int32_t welded_graph_vertex_count(const WeldedGraph *graph, uint64_t *out);
int32_t welded_graph_label_bits(const WeldedGraph *graph, uint32_t *out);
int32_t welded_graph_entrance_label(const WeldedGraph *graph, uint64_t *out);
int32_t welded_graph_exit_label(const WeldedGraph *graph, uint64_t *out);
int32_t welded_graph_noedge_label(const WeldedGraph *graph, uint64_t *out);
int32_t welded_graph_invalid_label(const WeldedGraph *graph, uint64_t *out);

/* WELDED_OK iff the graph passes exhaustive structural validation. */
int32_t welded_graph_validate(const WeldedGraph *graph);

/* Serialize to a NUL-terminated JSON string; free with welded_string_free. */
int32_t welded_graph_to_json(const WeldedGraph *graph, char **out);

void welded_string_free(char *s);

/* Oracles ------------------------------------------------------------ */

/* Create a query oracle. With permute != 0 the weld is permuted by a
 * seeded draw from the uniform color-preserving family, so callers can
 * average experiments over the hardness distribution. */
int32_t welded_oracle_new(const WeldedGraph *graph, int32_t permute,
                          uint64_t seed, WeldedOracle **out);

void welded_oracle_free(WeldedOracle *oracle);

/* One metered query: the label of the color-c neighbor of `label`, the
 * no-edge string when that vertex lacks the color, or the invalid string
 * when `label` names no vertex. */
int32_t welded_oracle_query(const WeldedOracle *oracle, uint32_t color,
                            uint64_t label, uint64_t *out);

/* Number of queries made so far. */
int32_t welded_oracle_meter(const WeldedOracle *oracle, uint64_t *out);

/* The unique color absent at the entrance; costs two metered queries. */
int32_t welded_oracle_missing_color(const WeldedOracle *oracle, uint32_t *out);

/* Walk ---------------------------------------------------------------- */

/* Exit-column probability of the continuous-time column walk at `time`,
 * integrated with fixed step dt (dt > 0). */
int32_t welded_column_walk(uint32_t n, double time, double dt, double *out);

/* Static version string; do not free. */
const char *welded_version(void);

#ifdef __cplusplus
}
#endif

#endif /* WELDED_H */
