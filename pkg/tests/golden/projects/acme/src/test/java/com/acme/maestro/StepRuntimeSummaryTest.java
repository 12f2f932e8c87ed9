package com.acme.maestro;

import static org.junit.Assert.assertEquals;

import org.junit.BeforeClass;
import org.junit.Test;

public class StepRuntimeSummaryTest extends MaestroEngineBaseTest {
    @BeforeClass
    public static void init() {
        MaestroEngineBaseTest.init();
    }

    @Test
    public void testAddRuntime() {
        StepRuntimeSummary summary = new StepRuntimeSummary();
        summary.addRuntime(40L);
        summary.addRuntime(2L);
        assertEquals(42L, summary.getRuntimeMillis());
    }
}
