#ifndef FGCS_H
#define FGCS_H

/* Generated by cbindgen from the fgcs-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every entry point.
typedef enum {
  FgcStatus_Ok = 0,
  FgcStatus_PropertyViolation = 1,
  FgcStatus_InvalidInput = 2,
  FgcStatus_NullPointer = 3,
  FgcStatus_InternalError = 4,
} FgcStatus;

// Opaque handle to a finite poset.
typedef struct FgcPoset FgcPoset;

// Opaque handle to a validated space with its family.
typedef struct FgcSpace FgcSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the underlying library, as a static string.
const char *fgc_version(void);

// Frees a string returned by any function in this library.
//
// # Safety
// `s` must be a pointer previously returned through an out-parameter of
// this library and not yet freed; null is ignored.
void fgc_string_free(char *s);

// Parses and fully validates a space document (universe, gamma, tau,
// family). On success the handle is stored in `out`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be a valid pointer.
FgcStatus fgc_space_parse(const char *json, FgcSpace **out);

// Releases a space handle.
//
// # Safety
// `space` must come from [`fgc_space_parse`] or [`fgc_poset_to_space`]
// and not be used afterwards; null is ignored.
void fgc_space_free(FgcSpace *space);

// Validates a space document without keeping a handle, writing the full
// report JSON whenever the document could be interpreted.
//
// # Safety
// `json` must be a NUL-terminated string; `report_out` must be valid.
FgcStatus fgc_space_validate(const char *json, char **report_out);

// Writes the regular opens of a space as a JSON array of rendered sets.
//
// # Safety
// `space` must be a live handle; `out` must be valid.
FgcStatus fgc_space_regulars(const FgcSpace *space, char **out);

// Writes the basis (family hulls) as a JSON array of rendered sets.
//
// # Safety
// `space` must be a live handle; `out` must be valid.
FgcStatus fgc_space_basis(const FgcSpace *space, char **out);

// Decides way-below between two regular opens given as `{a,b}` strings,
// writing 0 or 1 into `result`. A nonzero `oracle` also runs the
// definitional oracle where it fits and reports any disagreement.
//
// # Safety
// `space` must be a live handle; `u1`, `u2` NUL-terminated; `result`
// must be valid.
FgcStatus fgc_space_way_below(const FgcSpace *space,
                              const char *u1,
                              const char *u2,
                              int oracle,
                              int *result);

// Writes the space classification as JSON: the trichotomy class, the
// number of regular opens, and the order flags of their inclusion
// order.
//
// # Safety
// `space` must be a live handle; `out` must be valid.
FgcStatus fgc_space_classify(const FgcSpace *space, char **out);

// Serializes the space behind a handle back to its document form.
//
// # Safety
// `space` must be a live handle; `out` must be valid.
FgcStatus fgc_space_to_json(const FgcSpace *space, char **out);

// Parses a poset document (`elements` plus `leq` pairs; the
// reflexive-transitive closure is applied on load).
//
// # Safety
// `json` must be NUL-terminated; `out` must be valid.
FgcStatus fgc_poset_parse(const char *json, FgcPoset **out);

// Releases a poset handle.
//
// # Safety
// `poset` must come from [`fgc_poset_parse`] and not be used afterwards;
// null is ignored.
void fgc_poset_free(FgcPoset *poset);

// Writes the order classification flags of a poset as JSON.
//
// # Safety
// `poset` must be a live handle; `out` must be valid.
FgcStatus fgc_poset_classify(const FgcPoset *poset, char **out);

// Runs the representation round trip of a poset, writing the report
// JSON. Returns `PropertyViolation` when the round trip fails.
//
// # Safety
// `poset` must be a live handle; `report_out` must be valid.
FgcStatus fgc_poset_roundtrip(const FgcPoset *poset, char **report_out);

// Derives the space of a poset and returns it as a new space handle.
//
// # Safety
// `poset` must be a live handle; `out` must be valid.
FgcStatus fgc_poset_to_space(const FgcPoset *poset, FgcSpace **out);

// Way-below on the rational-ray carrier; endpoints use the grammar
// `(p/q,inf)`, `[p/q,inf)` or `all`. Closed rays are rejected as not
// regular.
//
// # Safety
// `u1` and `u2` must be NUL-terminated; `result` must be valid.
FgcStatus fgc_ray_way_below(const char *u1, const char *u2, int *result);

// Runs the seeded miner and writes its report JSON. Returns
// `PropertyViolation` when any violation was found.
//
// # Safety
// `report_out` must be valid.
FgcStatus fgc_mine(uint64_t seed, uintptr_t count, uintptr_t max_n, char **report_out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FGCS_H */
