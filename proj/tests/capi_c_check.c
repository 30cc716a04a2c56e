/* The public header must compile as C. */
#include "tracelab/tracelab.h"

#include <stdio.h>
#include <string.h>

int main(void) {
    char* out = NULL;
    if (tl_query("validate B[s=1,p=2,q=2,gamma=1/2]", &out) != TL_OK) {
        fprintf(stderr, "%s\n", tl_last_error());
        return 1;
    }
    int ok = strstr(out, "\"ap\":true") != NULL;
    tl_free_string(out);
    return ok ? 0 : 1;
}
