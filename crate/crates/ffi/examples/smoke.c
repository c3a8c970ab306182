/* Build the 11-rule example account and trace one query.
 *
 *   cargo build -p kwstruct-ffi --release
 *   cc crates/ffi/examples/smoke.c -Icrates/ffi/include \
 *      target/release/libkwstruct_ffi.a -lpthread -ldl -lm -o smoke
 *   ./smoke
 */
#include <stdio.h>

#include "kwstruct.h"

static const char *RULES =
    "{\"keyword\":\"nike shoes\",\"cpc_micros\":100000,\"items\":[\"item1\"]}\n"
    "{\"keyword\":\"adidas superstar\",\"cpc_micros\":700000,\"items\":[\"item5\"]}\n"
    "{\"keyword\":\"air max\",\"cpc_micros\":1100000,\"items\":[\"item2\"]}\n";

int main(void) {
    KwsAccount *account = NULL;
    if (kws_account_build(RULES, "nike\nadidas\n", "reebok\n", KWS_MODE_REDUCED, &account) != KWS_STATUS_OK) {
        fprintf(stderr, "build failed: %s\n", kws_last_error_message());
        return 2;
    }
    char *trajectory = NULL;
    if (kws_simulate(account, "nike shoes", &trajectory) == KWS_STATUS_OK) {
        printf("%s\n", trajectory);
        kws_string_free(trajectory);
    }
    KwsStatus st = kws_verify(account, 42, 200, NULL);
    printf("verify: %s\n", st == KWS_STATUS_OK ? "passed" : "failed");
    kws_account_free(account);
    return st == KWS_STATUS_OK ? 0 : 1;
}
