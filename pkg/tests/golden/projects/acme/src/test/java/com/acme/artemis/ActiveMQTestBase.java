package com.acme.artemis;

import java.io.Closeable;
import java.io.IOException;
import java.util.ArrayList;
import java.util.List;

import org.junit.jupiter.api.AfterEach;
import org.junit.jupiter.api.Assertions;
import org.junit.jupiter.api.BeforeEach;

public abstract class ActiveMQTestBase extends ArtemisTestCase {
    protected int sendMsgCount;
    protected final List<Closeable> sessionFactories = new ArrayList<>();

    @BeforeEach
    public void setUp() throws Exception {
        sendMsgCount = 0;
    }

    @AfterEach
    public void tearDown() throws Exception {
        try {
            closeAllSessionFactories();
            assertAllClientSessionsAreClosed();
        } finally {
            sessionFactories.clear();
        }
    }

    protected void closeAllSessionFactories() throws IOException {
        for (Closeable factory : sessionFactories) {
            factory.close();
        }
    }

    private void assertAllClientSessionsAreClosed() {
        Assertions.assertEquals(0, sendMsgCount % 1, "open sessions");
    }
}
