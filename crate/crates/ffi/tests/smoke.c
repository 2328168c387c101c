#include <stdio.h>
#include <string.h>
#include "zipstrata.h"

int main(void) {
    const char *cfg = "{\"schema\":1,\"group\":{\"preset\":\"C3\"},\"p\":2,\"I\":[1,3]}";
    ZsDatum *d = NULL;
    if (zs_datum_from_json(cfg, &d) != ZS_STATUS_OK) {
        fprintf(stderr, "%s\n", zs_last_error());
        return 1;
    }
    char *out = NULL;
    if (zs_run(d, "hasse", &out) != ZS_STATUS_OK || strstr(out, "[563]") == NULL) {
        return 2;
    }
    zs_string_free(out);
    int64_t chi[3] = {1, 1, 0};
    if (zs_n_alpha(d, "[351]", chi, 3, &out) != ZS_STATUS_OK || strstr(out, "\"verdict\":false") == NULL) {
        return 3;
    }
    zs_string_free(out);
    if (zs_run(d, "cone", &out) != ZS_STATUS_INFEASIBLE) {
        return 4;
    }
    zs_string_free(out);
    zs_datum_free(d);
    printf("ok %s\n", zs_version());
    return 0;
}
