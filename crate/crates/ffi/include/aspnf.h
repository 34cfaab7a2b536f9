#ifndef ASPNF_H
#define ASPNF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AspnfStatus {
  ASPNF_STATUS_OK = 0,
  ASPNF_STATUS_NULL_ARGUMENT = 1,
  ASPNF_STATUS_INVALID_UTF8 = 2,
  ASPNF_STATUS_SYNTAX = 3,
  ASPNF_STATUS_INVALID_ATOM = 4,
  ASPNF_STATUS_TOO_LARGE = 5,
  ASPNF_STATUS_PRECONDITION = 6,
  ASPNF_STATUS_OUT_OF_RANGE = 7,
  ASPNF_STATUS_INTERNAL = 8,
} AspnfStatus;

/*
 Opaque list of answer sets, each pre-rendered as `{a, b}`.
 */
typedef struct AspnfAnswerSets AspnfAnswerSets;

/*
 Opaque parsed program.
 */
typedef struct AspnfProgram AspnfProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL.

 The pointer stays valid until the next call into this library on the same thread.
 */
const char *aspnf_last_error(void);

/*
 Parses a program in the text format.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum AspnfStatus aspnf_parse(const char *text, bool allow_reserved, struct AspnfProgram **out);

/*
 # Safety
 `program` must come from this library and not be used afterwards. NULL is ignored.
 */
void aspnf_program_free(struct AspnfProgram *program);

/*
 # Safety
 `s` must be a string returned by this library. NULL is ignored.
 */
void aspnf_string_free(char *s);

/*
 Renders the program, one rule per line. Free with `aspnf_string_free`.

 # Safety
 `program` must be a live handle; `out` must be writable.
 */
enum AspnfStatus aspnf_program_render(const struct AspnfProgram *program, char **out);

/*
 # Safety
 `program` must be a live handle or NULL (which yields 0).
 */
size_t aspnf_program_rule_count(const struct AspnfProgram *program);

/*
 # Safety
 `program` must be a live handle or NULL (which yields 0).
 */
size_t aspnf_program_atom_count(const struct AspnfProgram *program);

/*
 Enumerates answer sets. `max_atoms` of 0 keeps the default cap.

 # Safety
 `program` must be a live handle; `out` must be writable.
 */
enum AspnfStatus aspnf_solve(const struct AspnfProgram *program,
                             size_t max_atoms,
                             struct AspnfAnswerSets **out);

/*
 # Safety
 `sets` must be a live handle or NULL (which yields 0).
 */
size_t aspnf_answer_sets_len(const struct AspnfAnswerSets *sets);

/*
 Borrowed `{a, b}` rendering of answer set `index`, valid while `sets` lives.

 # Safety
 `sets` must be a live handle; `out` must be writable.
 */
enum AspnfStatus aspnf_answer_sets_get(const struct AspnfAnswerSets *sets,
                                       size_t index,
                                       const char **out);

/*
 # Safety
 `sets` must come from `aspnf_solve` and not be used afterwards. NULL is ignored.
 */
void aspnf_answer_sets_free(struct AspnfAnswerSets *sets);

/*
 # Safety
 `program` must be a live handle; `out` must be writable.
 */
enum AspnfStatus aspnf_check_kernel(const struct AspnfProgram *program, bool *out);

/*
 # Safety
 `program` must be a live handle; `out` must be writable.
 */
enum AspnfStatus aspnf_check_3kernel(const struct AspnfProgram *program, bool *out);

/*
 Runs the 3-kernel pipeline. When `trace_json` is not NULL it receives the
 trace as JSON, to be freed with `aspnf_string_free`.

 # Safety
 `program` must be a live handle; `out` must be writable; `trace_json` may be NULL.
 */
enum AspnfStatus aspnf_three_kernelize(const struct AspnfProgram *program,
                                       struct AspnfProgram **out,
                                       char **trace_json);

/*
 Kernel program with the same answer sets modulo projection on the input atoms.

 # Safety
 `program` must be a live handle; `out` must be writable.
 */
enum AspnfStatus aspnf_kernelize(const struct AspnfProgram *program,
                                 size_t max_atoms,
                                 struct AspnfProgram **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASPNF_H */
