/* C interface to the return-code voting library. Every call returns an
 * rcv_status; on failure rcv_last_error() describes the problem (per
 * thread, valid until the next call on that thread). Strings returned
 * through char** out-parameters are owned by the caller and released with
 * rcv_string_free. Reports are single-line JSON objects. */
#ifndef RCV_H
#define RCV_H

#include <stdint.h>

#if defined(_WIN32)
#define RCV_API __declspec(dllexport)
#else
#define RCV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rcv_status {
  RCV_OK = 0,
  RCV_ERR_INVALID_ARGUMENT = 1,
  RCV_ERR_FORMAT = 2,
  RCV_ERR_PROOF = 3,
  RCV_ERR_PROTOCOL = 4,
  RCV_ERR_MALFORMED_PLAINTEXT = 5,
  RCV_ERR_IO = 6,
  /* A verification ran and found a problem; the report says which. */
  RCV_ERR_VERIFY_FAILED = 7,
  RCV_ERR_INTERNAL = 8
} rcv_status;

typedef enum rcv_platform {
  RCV_PLATFORM_HONEST = 0,
  /* Encrypts a flipped choice and adjusts btilde so the PET passes. */
  RCV_PLATFORM_FLIP_CONSISTENT = 1,
  /* Encrypts a flipped choice but leaves btilde unchanged. */
  RCV_PLATFORM_FLIP_INCONSISTENT = 2
} rcv_platform;

typedef struct rcv_election rcv_election;

RCV_API const char* rcv_version(void);
RCV_API const char* rcv_last_error(void);
RCV_API const char* rcv_status_name(rcv_status status);
RCV_API void rcv_string_free(char* s);

/* Configuration text is the key = value format; NULL or "" means defaults. */
RCV_API rcv_status rcv_config_normalize(const char* config_text, char** out_text);

/* Key generation. Publishes the params and key entries. */
RCV_API rcv_status rcv_election_create(const char* config_text, rcv_election** out);
RCV_API rcv_status rcv_election_load(const char* dir, rcv_election** out);
RCV_API rcv_status rcv_election_save(const rcv_election* e, const char* dir);
RCV_API void rcv_election_free(rcv_election* e);

/* Code generation and sheet printing. */
RCV_API rcv_status rcv_election_register(rcv_election* e);
/* choices is a string of '0'/'1', one per option. flip_option is 1-based
 * and used only by cheating platforms. */
RCV_API rcv_status rcv_election_cast(rcv_election* e, const char* voter_id, const char* choices,
                                     rcv_platform platform, int flip_option, char** out_report);
RCV_API rcv_status rcv_election_finalize(rcv_election* e, const char* voter_id, char** out_report);
RCV_API rcv_status rcv_election_tally(rcv_election* e, char** out_report);
RCV_API rcv_status rcv_election_sheet(const rcv_election* e, const char* voter_id, char** out_text);
RCV_API rcv_status rcv_election_board(const rcv_election* e, char** out_text);
RCV_API rcv_status rcv_election_status(const rcv_election* e, char** out_report);

/* Full replay of a board. RCV_OK when valid, RCV_ERR_VERIFY_FAILED when
 * not; the report carries the reason either way. */
RCV_API rcv_status rcv_verify_board_file(const char* path, char** out_report);
RCV_API rcv_status rcv_verify_board_text(const char* text, char** out_report);

RCV_API rcv_status rcv_run_election(const char* config_text, char** out_report);
RCV_API rcv_status rcv_experiment_cai(const char* config_text, uint64_t trials, char** out_report);
RCV_API rcv_status rcv_experiment_privacy(const char* config_text, uint64_t trials, char** out_report);
/* as_json = 0 gives a human-readable transcript. */
RCV_API rcv_status rcv_attack_demo(const char* seed, unsigned group_bits, int as_json, char** out_report);

#ifdef __cplusplus
}
#endif

#endif
