#ifndef DICENOTE_H
#define DICENOTE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* All strings are NUL-terminated UTF-8. Returned documents are JSON and must
 * be released with dicenote_free. */

char *dicenote_roll(const char *expression, uint64_t seed, int use_seed,
                    const char *macros_json);
void dicenote_free(char *document);
const char *dicenote_version(void);

typedef struct DicenoteSession DicenoteSession;

DicenoteSession *dicenote_session_new(uint64_t seed, int use_seed);
char *dicenote_session_roll(DicenoteSession *session, const char *expression);
void dicenote_session_free(DicenoteSession *session);

#ifdef __cplusplus
}
#endif

#endif
