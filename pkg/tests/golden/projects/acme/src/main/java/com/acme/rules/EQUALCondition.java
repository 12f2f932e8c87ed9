package com.acme.rules;

public class EQUALCondition implements Condition {
    private final String attribute;
    private final String expected;

    public EQUALCondition(String attribute, String expected) {
        this.attribute = attribute;
        this.expected = expected;
    }

    @Override
    public boolean holds(String attribute, String value) {
        return this.attribute.equals(attribute) && expected.equals(value);
    }
}
