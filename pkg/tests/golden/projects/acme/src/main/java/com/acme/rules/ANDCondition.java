package com.acme.rules;

public class ANDCondition implements Condition {
    private final Condition[] parts;

    public ANDCondition(Condition... parts) {
        this.parts = parts;
    }

    @Override
    public boolean holds(String attribute, String value) {
        for (Condition c : parts) {
            if (!c.holds(attribute, value)) {
                return false;
            }
        }
        return true;
    }
}
